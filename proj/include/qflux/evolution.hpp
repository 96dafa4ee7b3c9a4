#pragma once

#include <limits>
#include <string>

#include "qflux/flux.hpp"
#include "qflux/states.hpp"
#include "qflux/types.hpp"

namespace qflux {

/// Free evolution: each momentum amplitude picks up e^{-i T(p) dt / hbar}.
/// Exact (no time-step error) and norm preserving.
GridState evolve_free(const GridState& state, Real dt);
SpectralState evolve_free(const SpectralState& state, Real dt);

/// Strang splitting e^{-iU dt/2h} e^{-iT dt/h} e^{-iU dt/2h} with the deformed
/// kinetic phase applied exactly in momentum space. Second order in dt,
/// exactly unitary per step. `potential` is U sampled on psi's grid.
CoordinateState evolve_split_step(const CoordinateState& psi, const ArrayXr& potential,
                                  Real dt, int steps);

/// Truncated-series time derivative of the probability density,
/// (1/2m i hbar) sum_n a_n beta^(n-1) (psi* p^2n psi - psi p^2n psi*).
/// Potential terms cancel, so this holds with or without U.
ArrayXr drho_dt(const CoordinateState& psi, const KineticCoefficients& coeffs, int n_terms);
ArrayXr drho_dt(const CoordinateState& psi, const KineticCoefficients& coeffs, int n_terms,
                const ArrayXr& x);

enum class RhoMethod { Analytic, Series, TimeDifference };
enum class CurrentMethod { ClosedGrid, Series, ClosedSpectral };

struct ResidualOptions {
  RhoMethod rho = RhoMethod::Analytic;
  CurrentMethod current = CurrentMethod::ClosedGrid;
  int order_rho = 16;
  int order_current = 16;
  Real dt_fd = std::numeric_limits<Real>::quiet_NaN();  // NaN: auto scale
  /// Analytic route only: resolve the state's continuum amplitude on an
  /// oversampled momentum grid so the density derivative is reference
  /// accurate and the residual isolates the flux quadrature error.
  int reference_oversample = 1;
  bool allow_order_mismatch = false;
};

/// Both sides of the continuity equation and their mismatch
/// r(x) = d(rho)/dt + d(j)/dx on the half-spacing residual grid.
struct ResidualReport {
  ArrayXr x;
  ArrayXr values;
  Real max_abs = 0;
  Real l2 = 0;
  std::string rho_method;
  std::string current_method;
  Real dt_fd = std::numeric_limits<Real>::quiet_NaN();
};

ResidualReport continuity_residual(const GridState& state, const ResidualOptions& options = {});
ResidualReport continuity_residual(const SpectralState& state, const ArrayXr& x,
                                   const ResidualOptions& options = {});

}  // namespace qflux
