#pragma once

// Independent numerical oracles used only by tests: finite differences and
// Richardson extrapolation. Deliberately unrelated to the implementation
// paths they check.

#include <array>
#include <cmath>
#include <functional>

namespace oracles {

/// Plain second-order central difference with a rounding-balanced step.
inline double central_derivative(const std::function<double(double)>& f, double x) {
  const double h = std::cbrt(2.2e-16) * std::max(1.0, std::abs(x));
  return (f(x + h) - f(x - h)) / (2 * h);
}

/// Richardson-extrapolated central differences for even-order derivatives of
/// an even function at 0. `stencil` evaluates the raw divided difference at
/// step h; the error expansion is in powers of h^2.
inline double richardson(const std::function<double(double)>& stencil, double h0, int levels) {
  constexpr int kMax = 8;
  std::array<double, kMax> row{};
  double result = 0;
  for (int i = 0; i < levels; ++i) {
    double value = stencil(h0 / std::pow(2.0, i));
    double factor = 4;
    for (int j = 0; j < i; ++j) {
      const double next = (factor * value - row[j]) / (factor - 1);
      row[j] = value;
      value = next;
      factor *= 4;
    }
    row[i] = value;
    result = value;
  }
  return result;
}

/// d^2 f / dx^2 at 0 for even f.
inline double second_derivative_at_zero(const std::function<double(double)>& f, double h0,
                                        int levels) {
  return richardson([&](double h) { return 2 * (f(h) - f(0)) / (h * h); }, h0, levels);
}

/// d^4 f / dx^4 at 0 for even f.
inline double fourth_derivative_at_zero(const std::function<double(double)>& f, double h0,
                                        int levels) {
  return richardson(
      [&](double h) { return (2 * f(2 * h) - 8 * f(h) + 6 * f(0)) / (h * h * h * h); }, h0,
      levels);
}

}  // namespace oracles
