#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "qflux/power_series.hpp"
#include "qflux/types.hpp"

namespace qflux {

/// A deformed Heisenberg commutation relation, encoded through the odd
/// deformation function f that maps the auxiliary momentum p to the physical
/// momentum P = f(sqrt(beta) p)/sqrt(beta). Everything downstream (kinetic
/// energy, velocity, flux kernels) derives from this object.
///
/// Built-ins: the undeformed relation (f = identity, unbounded momentum) and
/// the tan representation of the quadratic commutator (momentum domain
/// [-pi/(2 sqrt(beta)), pi/(2 sqrt(beta))]). Arbitrary relations enter as a
/// list of odd Taylor coefficients with c1 = 1, plus optional closed-form
/// evaluator hooks.
template <typename Scalar>
class DeformationSpecT {
 public:
  enum class Kind { Undeformed, KempfTan, UserSeries };

  static DeformationSpecT undeformed(Scalar hbar = 1, Scalar mass = 1) {
    DeformationSpecT s;
    s.kind_ = Kind::Undeformed;
    s.beta_ = 0;
    s.hbar_ = hbar;
    s.mass_ = mass;
    s.bound_ = std::numeric_limits<Scalar>::infinity();
    s.odd_coeffs_ = {Scalar(1)};
    s.check_constants();
    return s;
  }

  static DeformationSpecT kempf_tan(Scalar beta, Scalar hbar = 1, Scalar mass = 1) {
    DeformationSpecT s;
    s.kind_ = Kind::KempfTan;
    s.beta_ = beta;
    s.hbar_ = hbar;
    s.mass_ = mass;
    s.bound_ = beta > 0 ? pi / (2 * std::sqrt(beta))
                        : std::numeric_limits<Scalar>::infinity();
    s.check_constants();
    return s;
  }

  /// odd_coeffs[k] multiplies u^(2k+1); the leading entry must be exactly 1 so
  /// the beta -> 0 limit recovers P = p. The closed-form hooks, when given,
  /// replace the truncated series in pointwise evaluation.
  static DeformationSpecT user_series(std::vector<Scalar> odd_coeffs, Scalar beta,
                                      Scalar momentum_bound, Scalar hbar = 1,
                                      Scalar mass = 1,
                                      std::function<Scalar(Scalar)> f_closed = {},
                                      std::function<Scalar(Scalar)> f_prime_closed = {}) {
    DeformationSpecT s;
    s.kind_ = Kind::UserSeries;
    s.beta_ = beta;
    s.hbar_ = hbar;
    s.mass_ = mass;
    s.bound_ = momentum_bound;
    s.odd_coeffs_ = std::move(odd_coeffs);
    s.f_closed_ = std::move(f_closed);
    s.f_prime_closed_ = std::move(f_prime_closed);
    s.check_constants();
    if (s.odd_coeffs_.empty() || s.odd_coeffs_.front() != Scalar(1))
      throw std::invalid_argument("DeformationSpec: leading odd coefficient must be 1");
    if (!(momentum_bound > 0))
      throw std::invalid_argument("DeformationSpec: momentum bound must be positive");
    s.check_monotonic();
    return s;
  }

  Kind kind() const { return kind_; }
  Scalar beta() const { return beta_; }
  Scalar hbar() const { return hbar_; }
  Scalar mass() const { return mass_; }
  Scalar momentum_bound() const { return bound_; }
  Scalar minimal_length() const { return hbar_ * std::sqrt(beta_); }
  const std::vector<Scalar>& odd_coeffs() const { return odd_coeffs_; }
  const std::function<Scalar(Scalar)>& f_closed() const { return f_closed_; }
  const std::function<Scalar(Scalar)>& f_prime_closed() const { return f_prime_closed_; }

  friend bool operator==(const DeformationSpecT& a, const DeformationSpecT& b) {
    return a.kind_ == b.kind_ && a.beta_ == b.beta_ && a.hbar_ == b.hbar_ &&
           a.mass_ == b.mass_ && a.bound_ == b.bound_ &&
           a.odd_coeffs_ == b.odd_coeffs_;
  }
  friend bool operator!=(const DeformationSpecT& a, const DeformationSpecT& b) {
    return !(a == b);
  }

 private:
  void check_constants() const {
    if (!(beta_ >= 0)) throw std::invalid_argument("DeformationSpec: beta must be >= 0");
    if (!(hbar_ > 0)) throw std::invalid_argument("DeformationSpec: hbar must be > 0");
    if (!(mass_ > 0)) throw std::invalid_argument("DeformationSpec: mass must be > 0");
  }

  // f must be strictly increasing on the momentum domain; sampled check, the
  // admissibility condition adopted for user-supplied series.
  void check_monotonic() const {
    if (!(beta_ > 0) || !std::isfinite(bound_)) return;
    const Scalar u_max = std::sqrt(beta_) * bound_;
    for (int i = 0; i <= 64; ++i) {
      const Scalar u = u_max * Scalar(i) / Scalar(64);
      const Scalar fp = f_prime_closed_ ? f_prime_closed_(u)
                                        : odd_series_derivative(odd_coeffs_, u);
      if (!(fp > 0))
        throw std::invalid_argument(
            "DeformationSpec: deformation function not strictly increasing on its domain");
    }
  }

  Kind kind_ = Kind::Undeformed;
  Scalar beta_ = 0, hbar_ = 1, mass_ = 1;
  Scalar bound_ = std::numeric_limits<Scalar>::infinity();
  std::vector<Scalar> odd_coeffs_;
  std::function<Scalar(Scalar)> f_closed_, f_prime_closed_;
};

/// Taylor coefficients of the kinetic-energy series
/// T(p) = (1/2m) sum_n coeff(n) beta^(n-1) p^(2n), n = 1..order().
template <typename Scalar>
class KineticCoefficientsT {
 public:
  explicit KineticCoefficientsT(std::vector<Scalar> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty())
      throw std::invalid_argument("KineticCoefficients: need at least one term");
  }
  int order() const { return static_cast<int>(coeffs_.size()); }
  Scalar coeff(int n) const { return coeffs_.at(static_cast<std::size_t>(n) - 1); }  // 1-based
  const std::vector<Scalar>& values() const { return coeffs_; }

 private:
  std::vector<Scalar> coeffs_;
};

using DeformationSpec = DeformationSpecT<Real>;
using KineticCoefficients = KineticCoefficientsT<Real>;

namespace detail {

// Odd/even symmetry is enforced bit-exactly by evaluating at |u| and applying
// the sign afterwards; parity identities downstream (T even, T' odd) then hold
// without rounding slack.
template <typename Scalar>
Scalar deformation_abs(const DeformationSpecT<Scalar>& spec, Scalar a) {
  using Kind = typename DeformationSpecT<Scalar>::Kind;
  switch (spec.kind()) {
    case Kind::Undeformed:
      return a;
    case Kind::KempfTan:
      if (!(a < pi / 2))
        throw std::domain_error("deformation_function: argument at or beyond pole");
      return std::tan(a);
    case Kind::UserSeries:
      return spec.f_closed() ? spec.f_closed()(a) : odd_series_eval(spec.odd_coeffs(), a);
  }
  throw std::logic_error("unreachable");
}

template <typename Scalar>
Scalar deformation_derivative_abs(const DeformationSpecT<Scalar>& spec, Scalar a) {
  using Kind = typename DeformationSpecT<Scalar>::Kind;
  switch (spec.kind()) {
    case Kind::Undeformed:
      return Scalar(1);
    case Kind::KempfTan: {
      if (!(a < pi / 2))
        throw std::domain_error("deformation_derivative: argument at or beyond pole");
      const Scalar t = std::tan(a);
      return 1 + t * t;
    }
    case Kind::UserSeries:
      return spec.f_prime_closed() ? spec.f_prime_closed()(a)
                                   : odd_series_derivative(spec.odd_coeffs(), a);
  }
  throw std::logic_error("unreachable");
}

template <typename Scalar>
void require_in_domain(const DeformationSpecT<Scalar>& spec, Scalar p, const char* who) {
  if (std::abs(p) > spec.momentum_bound())
    throw std::domain_error(std::string(who) + ": momentum outside [-b, b]");
}

}  // namespace detail

/// f(u), the odd deformation function.
template <typename Scalar>
Scalar deformation_function(const DeformationSpecT<Scalar>& spec, Scalar u) {
  const Scalar v = detail::deformation_abs(spec, std::abs(u));
  return std::signbit(u) ? -v : v;
}

/// f'(u); even in u.
template <typename Scalar>
Scalar deformation_derivative(const DeformationSpecT<Scalar>& spec, Scalar u) {
  return detail::deformation_derivative_abs(spec, std::abs(u));
}

/// The commutator deformation factor F evaluated at the physical momentum P:
/// F = f'(f^{-1}(sqrt(beta) P)). F(0) = 1 for every admissible relation.
template <typename Scalar>
Scalar commutator_factor(const DeformationSpecT<Scalar>& spec, Scalar P) {
  using Kind = typename DeformationSpecT<Scalar>::Kind;
  if (spec.beta() == 0 || spec.kind() == Kind::Undeformed) return Scalar(1);
  const Scalar sb = std::sqrt(spec.beta());
  const Scalar w = sb * std::abs(P);
  if (spec.kind() == Kind::KempfTan) {
    // f = tan, f' = 1 + tan^2, so F(P) = 1 + beta P^2 directly.
    return 1 + spec.beta() * P * P;
  }
  // Numerical inversion of the strictly increasing f on [0, sqrt(beta) b].
  Scalar lo = 0;
  Scalar hi = std::isfinite(spec.momentum_bound()) ? sb * spec.momentum_bound() : Scalar(1);
  if (std::isfinite(spec.momentum_bound())) {
    const Scalar f_hi = detail::deformation_abs(spec, hi);
    if (w > f_hi * (1 + Scalar(1e-12)))
      throw std::domain_error("commutator_factor: momentum outside the range of f");
  } else {
    while (detail::deformation_abs(spec, hi) < w) {
      hi *= 2;
      if (hi > Scalar(1e12))
        throw qflux::numerical_error("commutator_factor: bracketing the inverse failed");
    }
  }
  // Safeguarded Newton.
  Scalar u = std::min(w, hi);  // first guess: f(u) ~ u near 0
  for (int it = 0; it < 200; ++it) {
    const Scalar fu = detail::deformation_abs(spec, u) - w;
    if (fu > 0)
      hi = u;
    else
      lo = u;
    const Scalar fpu = detail::deformation_derivative_abs(spec, u);
    Scalar next = u - fu / fpu;
    if (!(next > lo) || !(next < hi)) next = (lo + hi) / 2;
    if (std::abs(next - u) <= Scalar(1e-15) * (1 + std::abs(u))) {
      u = next;
      return detail::deformation_derivative_abs(spec, u);
    }
    u = next;
  }
  throw qflux::numerical_error("commutator_factor: inversion did not converge");
}

/// Kinetic energy T(p) = f(sqrt(beta) p)^2 / (2 m beta); beta = 0 is an
/// explicit branch returning p^2/2m (never a limiting division).
template <typename Scalar>
Scalar kinetic_energy(const DeformationSpecT<Scalar>& spec, Scalar p) {
  detail::require_in_domain(spec, p, "kinetic_energy");
  if (spec.beta() == 0) return p * p / (2 * spec.mass());
  const Scalar u = std::sqrt(spec.beta()) * std::abs(p);
  const Scalar f = detail::deformation_abs(spec, u);
  return f * f / (2 * spec.mass() * spec.beta());
}

/// dT/dp = f(u) f'(u) / (m sqrt(beta)) with u = sqrt(beta) p; the particle
/// velocity for a free particle. Odd in p, bit-exactly.
template <typename Scalar>
Scalar kinetic_derivative(const DeformationSpecT<Scalar>& spec, Scalar p) {
  detail::require_in_domain(spec, p, "kinetic_derivative");
  if (spec.beta() == 0) return p / spec.mass();
  const Scalar sb = std::sqrt(spec.beta());
  const Scalar u = sb * std::abs(p);
  const Scalar v = detail::deformation_abs(spec, u) *
                   detail::deformation_derivative_abs(spec, u) / (spec.mass() * sb);
  return std::signbit(p) ? -v : v;
}

/// Kinetic Taylor coefficients a_1..a_N obtained by Cauchy-squaring the odd
/// coefficient list of f. a_1 = 1 exactly for every admissible relation.
template <typename Scalar>
KineticCoefficientsT<Scalar> taylor_coefficients(const DeformationSpecT<Scalar>& spec, int n_terms) {
  using Kind = typename DeformationSpecT<Scalar>::Kind;
  if (n_terms < 1) throw std::invalid_argument("taylor_coefficients: order must be >= 1");
  const auto n = static_cast<std::size_t>(n_terms);
  std::vector<Scalar> odd;
  switch (spec.kind()) {
    case Kind::Undeformed:
      odd.assign(n, Scalar(0));
      odd[0] = 1;
      break;
    case Kind::KempfTan:
      odd = tangent_odd_coeffs<Scalar>(n);
      break;
    case Kind::UserSeries:
      if (spec.odd_coeffs().size() < n)
        throw std::invalid_argument(
            "taylor_coefficients: deformation series too short for requested order");
      odd = spec.odd_coeffs();
      break;
  }
  return KineticCoefficientsT<Scalar>(odd_series_square_even(odd, n));
}

/// Partial sum (1/2m) sum_{n<=N} a_n beta^(n-1) p^(2n) of the kinetic series.
template <typename Scalar>
Scalar kinetic_energy_series(const KineticCoefficientsT<Scalar>& coeffs, Scalar beta,
                             Scalar mass, Scalar p, int n_terms) {
  if (n_terms < 1 || n_terms > coeffs.order())
    throw std::invalid_argument("kinetic_energy_series: order out of range");
  const Scalar p2 = p * p;
  Scalar beta_pow = 1, p_pow = p2, acc = 0;
  for (int n = 1; n <= n_terms; ++n) {
    acc += coeffs.coeff(n) * beta_pow * p_pow;
    beta_pow *= beta;
    p_pow *= p2;
  }
  return acc / (2 * mass);
}

/// Default diagonal threshold for the divided-difference kernel.
template <typename Scalar>
Scalar default_diagonal_threshold(const DeformationSpecT<Scalar>& spec) {
  const Scalar b = spec.momentum_bound();
  return Scalar(1e-8) * std::max(Scalar(1), std::isfinite(b) ? b : Scalar(1));
}

/// (T(p) - T(q))/(p - q), the kernel of the closed momentum-space flux form.
/// Within `threshold` of the diagonal the removable singularity is resolved
/// analytically as T'((p+q)/2), which keeps the kernel symmetric and accurate
/// where the subtraction would cancel.
template <typename Scalar>
Scalar divided_difference_kernel(const DeformationSpecT<Scalar>& spec, Scalar p, Scalar q,
                                 Scalar threshold) {
  detail::require_in_domain(spec, p, "divided_difference_kernel");
  detail::require_in_domain(spec, q, "divided_difference_kernel");
  if (std::abs(p - q) <= threshold)
    return kinetic_derivative(spec, (p + q) / 2);
  return (kinetic_energy(spec, p) - kinetic_energy(spec, q)) / (p - q);
}

template <typename Scalar>
Scalar divided_difference_kernel(const DeformationSpecT<Scalar>& spec, Scalar p, Scalar q) {
  return divided_difference_kernel(spec, p, q, default_diagonal_threshold(spec));
}

}  // namespace qflux
