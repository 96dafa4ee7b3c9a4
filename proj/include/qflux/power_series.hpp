#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace qflux {

// Odd power series are stored densely over odd orders only:
// coeffs[k] multiplies u^(2k+1).

/// First `count` odd Taylor coefficients of tan at 0, generated from
/// tan' = 1 + tan^2. Plain double recursion; coefficients decay like
/// (2/pi)^(2k) so there is no growth problem.
template <typename Scalar>
std::vector<Scalar> tangent_odd_coeffs(std::size_t count) {
  // full[j] is the order-j coefficient; only odd orders are nonzero.
  std::vector<Scalar> full(2 * count, Scalar(0));
  full[1] = Scalar(1);
  for (std::size_t j = 1; j + 1 < full.size(); ++j) {
    Scalar conv(0);
    for (std::size_t a = 0; a <= j; ++a) conv += full[a] * full[j - a];
    full[j + 1] = conv / Scalar(j + 1);
  }
  std::vector<Scalar> odd(count);
  for (std::size_t k = 0; k < count; ++k) odd[k] = full[2 * k + 1];
  return odd;
}

/// Evaluate the odd series at u: u*(c1 + c3 u^2 + c5 u^4 + ...), Horner in u^2.
template <typename Scalar>
Scalar odd_series_eval(const std::vector<Scalar>& coeffs, Scalar u) {
  const Scalar u2 = u * u;
  Scalar acc(0);
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * u2 + *it;
  return u * acc;
}

/// Termwise derivative of the odd series: c1 + 3 c3 u^2 + 5 c5 u^4 + ...
template <typename Scalar>
Scalar odd_series_derivative(const std::vector<Scalar>& coeffs, Scalar u) {
  const Scalar u2 = u * u;
  Scalar acc(0);
  for (std::size_t i = coeffs.size(); i-- > 0;)
    acc = acc * u2 + Scalar(2 * i + 1) * coeffs[i];
  return acc;
}

/// Even coefficients of the square of an odd series: result[n-1] multiplies
/// u^(2n), n = 1..n_terms (Cauchy product restricted to odd factors).
/// Requires coeffs.size() >= n_terms, i.e. the odd series known to order
/// 2*n_terms - 1.
template <typename Scalar>
std::vector<Scalar> odd_series_square_even(const std::vector<Scalar>& coeffs,
                                           std::size_t n_terms) {
  if (coeffs.size() < n_terms)
    throw std::invalid_argument(
        "odd_series_square_even: series order insufficient for requested terms");
  std::vector<Scalar> even(n_terms, Scalar(0));
  for (std::size_t n = 1; n <= n_terms; ++n) {
    Scalar acc(0);
    for (std::size_t k = 0; k < n; ++k) acc += coeffs[k] * coeffs[n - 1 - k];
    even[n - 1] = acc;
  }
  return even;
}

}  // namespace qflux
