#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

#include "qflux/types.hpp"

namespace qflux {

/// Gauss-Legendre nodes and weights on [a, b], Newton iteration on the
/// Legendre recurrence. Alternative quadrature for integrands that are not
/// smooth enough for the periodic trapezoidal rule.
template <typename Scalar>
std::pair<ArrayXr, ArrayXr> gauss_legendre(int n, Scalar a, Scalar b) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: need at least one node");
  ArrayXr nodes(n), weights(n);
  const Scalar mid = (a + b) / 2, half = (b - a) / 2;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Chebyshev-based initial guess for the i-th root of P_n.
    Scalar x = std::cos(pi * (Scalar(i) + Scalar(0.75)) / (Scalar(n) + Scalar(0.5)));
    Scalar dp = 0;
    for (int it = 0; it < 100; ++it) {
      Scalar p0 = 1, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const Scalar p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / Scalar(k);
        p0 = p1;
        p1 = p2;
      }
      dp = Scalar(n) * (x * p1 - p0) / (x * x - 1);
      const Scalar dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < Scalar(1e-15)) break;
    }
    const Scalar w = 2 / ((1 - x * x) * dp * dp);
    nodes[i] = mid - half * x;
    nodes[n - 1 - i] = mid + half * x;
    weights[i] = weights[n - 1 - i] = half * w;
  }
  return {nodes, weights};
}

}  // namespace qflux
