#pragma once

#include <functional>
#include <vector>

#include "qflux/algebra.hpp"
#include "qflux/types.hpp"

namespace qflux {

// Grid conventions. Momentum nodes are midpoint-symmetric on [-b_eff, b_eff]:
//   p_k = (k + 1/2 - M/2) * dp,  dp = 2 b_eff / M,  k = 0..M-1,
// so the grid is symmetric about 0 for every M, never touches the domain
// boundary, and carries the uniform (periodic trapezoidal) weight dp.
// Coordinate nodes mirror that layout with spacing dx = pi hbar / b_eff, the
// Nyquist rate of the band limit; with these choices the synthesis/analysis
// pair below is unitary to rounding, so spectral derivatives are exact for
// band-limited states.

ArrayXr momentum_grid(int m, Real b_eff);
ArrayXr coordinate_grid(int m, Real b_eff, Real hbar);
/// Twice as many nodes at half the spacing; resolves products of band-limited
/// functions (bandwidth up to 2 b_eff), as needed for flux divergences.
ArrayXr residual_grid(int m, Real b_eff, Real hbar);

/// Exact superposition of finitely many plane waves. Components are kept
/// sorted by momentum; adding a component at an existing momentum merges by
/// amplitude addition, so downstream results are independent of insertion
/// order.
class SpectralState {
 public:
  struct Component {
    Real p;
    Complex amplitude;
  };

  SpectralState(DeformationSpec spec, Real time = 0);

  void add(Real p, Complex amplitude);
  const std::vector<Component>& components() const { return comps_; }
  const DeformationSpec& spec() const { return spec_; }
  Real time() const { return t_; }
  void set_time(Real t) { t_ = t; }

 private:
  DeformationSpec spec_;
  Real t_ = 0;
  std::vector<Component> comps_;
};

/// Momentum-space wavefunction c(p) sampled on the canonical grid. States
/// built from a packet recipe keep the continuum amplitude (at t = 0) so
/// reference-resolution evaluations remain possible after construction.
struct GridState {
  DeformationSpec spec;
  Real b_eff = 0;
  Real time = 0;
  ArrayXr momenta;
  ArrayXc values;
  std::function<Complex(Real)> continuum;  // optional, amplitude at t = 0
  bool boundary_warning = false;           // |c(+-b_eff)| not negligible

  int size() const { return static_cast<int>(momenta.size()); }
  Real dp() const { return 2 * b_eff / size(); }
};

/// Coordinate-space wavefunction psi(x) on the matched Nyquist grid.
struct CoordinateState {
  DeformationSpec spec;
  Real b_eff = 0;
  Real time = 0;
  ArrayXr x;
  ArrayXc values;

  int size() const { return static_cast<int>(x.size()); }
  Real dx() const { return pi * spec.hbar() / b_eff; }
};

SpectralState plane_wave(const DeformationSpec& spec, Complex amplitude, Real p0, Real time = 0);

/// Sample an arbitrary momentum amplitude on the canonical grid. The boundary
/// guard flags (and reports on stderr) amplitudes that have not decayed at
/// +-b_eff, where the periodic quadrature stops converging.
GridState make_grid_state(const DeformationSpec& spec, int m, Real b_eff,
                          const std::function<Complex(Real)>& amplitude, Real time = 0);

/// Gaussian packet c(p) = N exp(-(p - p_mean)^2/(4 sigma^2) - i p x0 / hbar),
/// normalized so the synthesized coordinate wavefunction has unit L2 norm in
/// the continuum.
GridState gaussian_packet(const DeformationSpec& spec, int m, Real b_eff, Real p_mean,
                          Real sigma, Real x0 = 0, Real time = 0);

/// psi(x) = sum_k dp c(p_k) e^{i p_k x / hbar} on the matched coordinate grid.
CoordinateState synthesize_coordinate(const GridState& state);
/// Same synthesis evaluated on an arbitrary coordinate set.
ArrayXc synthesize_at(const GridState& state, const ArrayXr& x);

/// Exact evaluation of a plane-wave superposition.
CoordinateState synthesize_coordinate(const SpectralState& state, const ArrayXr& x, Real b_eff);
ArrayXc synthesize_at(const SpectralState& state, const ArrayXr& x);

/// Exact sampling of a plane-wave superposition on the canonical coordinate
/// grid (momenta should lie on the matching momentum grid for spectral
/// operations to be exact).
CoordinateState sample_on_grid(const SpectralState& state, int m, Real b_eff);

/// Inverse of synthesize_coordinate; requires the canonical grid (throws a
/// band-limit violation otherwise).
GridState to_momentum(const CoordinateState& state);

/// Apply the momentum operator k times: multiplies momentum samples by p^k.
/// Exact for band-limited states.
CoordinateState spectral_derivative(const CoordinateState& state, int k);

ArrayXr density(const CoordinateState& state);

Real norm(const GridState& state);
Real norm(const CoordinateState& state);
GridState normalize(const GridState& state);
CoordinateState normalize(const CoordinateState& state);

/// Complex conjugation: pointwise for psi(x); for momentum representations it
/// reflects the momentum content (c(p) -> conj(c(-p))).
CoordinateState conjugated(const CoordinateState& state);
GridState conjugated(const GridState& state);
SpectralState conjugated(const SpectralState& state);

Real mean_position(const CoordinateState& state);
/// <dT/dp> under |c(p)|^2, the packet's transport velocity.
Real mean_velocity(const GridState& state);

}  // namespace qflux
