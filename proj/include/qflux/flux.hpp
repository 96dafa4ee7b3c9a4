#pragma once

#include <limits>

#include "qflux/algebra.hpp"
#include "qflux/states.hpp"
#include "qflux/types.hpp"

namespace qflux {

enum class FluxMethod { SeriesOrderN, ClosedGrid, ClosedSpectral, Analytic };

const char* flux_method_name(FluxMethod method);

/// Probability-flux profile j(x). Values are real; every computation tracks
/// the imaginary residue it discarded (a large residue signals a quadrature or
/// aliasing bug and is raised as numerical_error before truncation).
struct FluxProfile {
  ArrayXr x;
  ArrayXr values;
  FluxMethod method = FluxMethod::ClosedGrid;
  int order = -1;  // series only
  Real time = 0;
  Real max_imag_residue = 0;
  Real truncation_estimate = std::numeric_limits<Real>::quiet_NaN();  // series only
};

/// A-posteriori size of the last retained kinetic-series term,
/// |a_N beta^(N-1) p_max^(2N)| / 2m; reported with every series profile so the
/// caller can see when the truncated form stops being trustworthy.
Real series_truncation_estimate(const KineticCoefficients& coeffs, Real beta, Real mass,
                                Real p_max, int n_terms);

/// Coordinate-space flux series truncated at order N, evaluated with exact
/// spectral derivatives; all momentum-operator powers of psi and conj(psi) up
/// to 2N-1 are synthesized once and reused. Output grid defaults to psi's own.
FluxProfile flux_series(const CoordinateState& psi, const KineticCoefficients& coeffs, int n_terms);
FluxProfile flux_series(const CoordinateState& psi, const KineticCoefficients& coeffs, int n_terms,
                        const ArrayXr& x);

/// Closed momentum-space double integral over the state's quadrature grid.
/// The (p, q) pair sum collapses onto the difference frequencies first
/// (O(M^2)), then a single synthesis per output point (O(M X)); the result is
/// real by construction of the symmetrized sum.
FluxProfile flux_closed_grid(const GridState& state, const ArrayXr& x);
FluxProfile flux_closed_grid(const GridState& state, const ArrayXr& x,
                             const DeformationSpec& kernel_spec);

/// Difference-frequency amplitudes R_d of the closed-form flux:
/// j(x) = R_0 + 2 Re sum_{d>=1} R_d e^{i d dp x / hbar}. Exposed so the flux
/// divergence can be formed analytically.
ArrayXc closed_grid_spectrum(const GridState& state);
/// d j / dx of the closed-form flux, exact from the spectrum above.
ArrayXr flux_closed_grid_dx(const GridState& state, const ArrayXr& x);

/// Exact finite pair sum over plane-wave components:
/// j(x) = sum_i |A_i|^2 T'(p_i)
///      + sum_{i<l} K(p_i, p_l) 2 Re[A_i conj(A_l) e^{i (p_i - p_l) x / hbar}].
/// The optional time argument free-evolves the component phases to t first.
FluxProfile flux_closed_spectral(const SpectralState& state, const ArrayXr& x);
FluxProfile flux_closed_spectral(const SpectralState& state, const ArrayXr& x, Real time);

/// |A|^2 dT/dp: the plane-wave flux, time independent.
Real flux_plane_wave(const DeformationSpec& spec, Complex amplitude, Real p0);

/// Both sides of the geometric-progression collapse
/// sum_{k=1}^n [q^(k-1) p^(2n-k) + p^(k-1) q^(2n-k)] = (p^2n - q^2n)/(p - q),
/// with the diagonal limit 2n p^(2n-1). Library code uses the quotient; the
/// summed form exists for verification.
struct GeometricSumPair {
  Real summed;
  Real quotient;
};
GeometricSumPair geometric_sum_identity(Real p, Real q, int n);

}  // namespace qflux
