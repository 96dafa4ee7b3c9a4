#include "qflux/states.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

namespace qflux {

namespace {

constexpr Complex kImagUnit{0, 1};

void require_band_limit(Real b_eff, const DeformationSpec& spec, const char* who) {
  if (!(b_eff > 0)) throw std::invalid_argument(std::string(who) + ": b_eff must be positive");
  if (b_eff > spec.momentum_bound())
    throw std::domain_error(std::string(who) + ": b_eff exceeds the momentum bound");
}

// Synthesis kernel e^{i p x / hbar} as a dense matrix; transforms here are
// plain matrix products (M is a few thousand at most, no FFT needed).
MatrixXc synthesis_matrix(const ArrayXr& x, const ArrayXr& p, Real hbar) {
  Eigen::MatrixXd phase = (x.matrix() * p.matrix().transpose()) / hbar;
  return (kImagUnit * phase.array().cast<Complex>()).exp().matrix();
}

}  // namespace

ArrayXr momentum_grid(int m, Real b_eff) {
  if (m < 2) throw std::invalid_argument("momentum_grid: need at least two nodes");
  const Real dp = 2 * b_eff / m;
  ArrayXr p(m);
  for (int k = 0; k < m; ++k) p[k] = (k + Real(0.5) - Real(m) / 2) * dp;
  return p;
}

ArrayXr coordinate_grid(int m, Real b_eff, Real hbar) {
  const Real dx = pi * hbar / b_eff;
  ArrayXr x(m);
  for (int j = 0; j < m; ++j) x[j] = (j + Real(0.5) - Real(m) / 2) * dx;
  return x;
}

ArrayXr residual_grid(int m, Real b_eff, Real hbar) {
  return coordinate_grid(2 * m, 2 * b_eff, hbar);
}

SpectralState::SpectralState(DeformationSpec spec, Real time)
    : spec_(std::move(spec)), t_(time) {}

void SpectralState::add(Real p, Complex amplitude) {
  if (std::abs(p) > spec_.momentum_bound())
    throw std::domain_error("SpectralState::add: momentum outside [-b, b]");
  auto it = std::lower_bound(comps_.begin(), comps_.end(), p,
                             [](const Component& c, Real v) { return c.p < v; });
  if (it != comps_.end() && it->p == p)
    it->amplitude += amplitude;
  else
    comps_.insert(it, Component{p, amplitude});
}

SpectralState plane_wave(const DeformationSpec& spec, Complex amplitude, Real p0, Real time) {
  SpectralState state(spec, time);
  const Complex phase = std::exp(-kImagUnit * kinetic_energy(spec, p0) * time / spec.hbar());
  state.add(p0, amplitude * phase);
  return state;
}

GridState make_grid_state(const DeformationSpec& spec, int m, Real b_eff,
                          const std::function<Complex(Real)>& amplitude, Real time) {
  require_band_limit(b_eff, spec, "make_grid_state");
  GridState state;
  state.spec = spec;
  state.b_eff = b_eff;
  state.time = time;
  state.momenta = momentum_grid(m, b_eff);
  state.values.resize(m);
  for (int k = 0; k < m; ++k) state.values[k] = amplitude(state.momenta[k]);
  state.continuum = amplitude;

  const Real peak = state.values.abs().maxCoeff();
  const Real edge = std::max(std::abs(amplitude(-b_eff)), std::abs(amplitude(b_eff)));
  if (peak > 0 && edge > 1e-8 * peak) {
    state.boundary_warning = true;
    std::cerr << "qflux: warning: momentum amplitude at +-b_eff is " << edge / peak
              << " of its peak; quadrature may not converge\n";
  }
  return state;
}

GridState gaussian_packet(const DeformationSpec& spec, int m, Real b_eff, Real p_mean,
                          Real sigma, Real x0, Real time) {
  if (!(sigma > 0)) throw std::invalid_argument("gaussian_packet: sigma must be positive");
  const Real hbar = spec.hbar();
  const Real amp = std::pow(2 * pi, Real(-0.75)) / std::sqrt(hbar * sigma);
  auto c0 = [=](Real p) {
    const Real d = p - p_mean;
    return amp * std::exp(-d * d / (4 * sigma * sigma)) *
           std::exp(-kImagUnit * p * x0 / hbar);
  };
  return make_grid_state(spec, m, b_eff, c0, time);
}

CoordinateState synthesize_coordinate(const GridState& state) {
  CoordinateState out;
  out.spec = state.spec;
  out.b_eff = state.b_eff;
  out.time = state.time;
  out.x = coordinate_grid(state.size(), state.b_eff, state.spec.hbar());
  out.values = synthesize_at(state, out.x);
  return out;
}

ArrayXc synthesize_at(const GridState& state, const ArrayXr& x) {
  const MatrixXc e = synthesis_matrix(x, state.momenta, state.spec.hbar());
  return state.dp() * (e * state.values.matrix()).array();
}

ArrayXc synthesize_at(const SpectralState& state, const ArrayXr& x) {
  ArrayXc psi = ArrayXc::Zero(x.size());
  const Real hbar = state.spec().hbar();
  for (const auto& c : state.components())
    psi += c.amplitude * (kImagUnit * (c.p / hbar) * x.cast<Complex>()).exp();
  return psi;
}

CoordinateState synthesize_coordinate(const SpectralState& state, const ArrayXr& x, Real b_eff) {
  require_band_limit(b_eff, state.spec(), "synthesize_coordinate");
  CoordinateState out;
  out.spec = state.spec();
  out.b_eff = b_eff;
  out.time = state.time();
  out.x = x;
  out.values = synthesize_at(state, x);
  return out;
}

CoordinateState sample_on_grid(const SpectralState& state, int m, Real b_eff) {
  return synthesize_coordinate(state, coordinate_grid(m, b_eff, state.spec().hbar()), b_eff);
}

GridState to_momentum(const CoordinateState& state) {
  const int m = state.size();
  if (m < 2) throw std::invalid_argument("to_momentum: need at least two samples");
  const Real hbar = state.spec.hbar();
  const Real dx_expected = pi * hbar / state.b_eff;
  const ArrayXr canonical = coordinate_grid(m, state.b_eff, hbar);
  const Real scale = std::max(Real(1), canonical.abs().maxCoeff());
  if (((state.x - canonical).abs() > 1e-9 * scale).any())
    throw std::domain_error(
        "to_momentum: coordinate grid violates the band-limit sampling rule");

  GridState out;
  out.spec = state.spec;
  out.b_eff = state.b_eff;
  out.time = state.time;
  out.momenta = momentum_grid(m, state.b_eff);
  const MatrixXc e = synthesis_matrix(state.x, out.momenta, hbar);
  out.values = (dx_expected / (2 * pi * hbar)) * (e.adjoint() * state.values.matrix()).array();
  return out;
}

CoordinateState spectral_derivative(const CoordinateState& state, int k) {
  if (k < 0) throw std::invalid_argument("spectral_derivative: order must be >= 0");
  if (k == 0) return state;
  GridState g = to_momentum(state);
  g.values *= g.momenta.pow(k).cast<Complex>();
  CoordinateState out = state;
  out.values = synthesize_at(g, state.x);
  return out;
}

ArrayXr density(const CoordinateState& state) { return state.values.abs2(); }

// The momentum-side norm carries the 2 pi hbar Plancherel factor of the
// unnormalized transform convention, so it equals the coordinate-side norm of
// the synthesized wavefunction.
Real norm(const GridState& state) {
  return std::sqrt(2 * pi * state.spec.hbar() * state.dp() * state.values.abs2().sum());
}

Real norm(const CoordinateState& state) {
  return std::sqrt(state.dx() * state.values.abs2().sum());
}

GridState normalize(const GridState& state) {
  const Real n = norm(state);
  if (!(n > 0)) throw std::invalid_argument("normalize: state has zero norm");
  GridState out = state;
  out.values /= n;
  if (auto c = state.continuum) out.continuum = [c, n](Real p) { return c(p) / n; };
  return out;
}

CoordinateState normalize(const CoordinateState& state) {
  const Real n = norm(state);
  if (!(n > 0)) throw std::invalid_argument("normalize: state has zero norm");
  CoordinateState out = state;
  out.values /= n;
  return out;
}

CoordinateState conjugated(const CoordinateState& state) {
  CoordinateState out = state;
  out.values = state.values.conjugate();
  return out;
}

GridState conjugated(const GridState& state) {
  GridState out = state;
  out.values = state.values.conjugate().reverse();
  if (auto c = state.continuum)
    out.continuum = [c](Real p) { return std::conj(c(-p)); };
  return out;
}

SpectralState conjugated(const SpectralState& state) {
  SpectralState out(state.spec(), state.time());
  for (const auto& c : state.components()) out.add(-c.p, std::conj(c.amplitude));
  return out;
}

Real mean_position(const CoordinateState& state) {
  const ArrayXr rho = density(state);
  const Real total = rho.sum();
  if (!(total > 0)) throw std::invalid_argument("mean_position: state has zero norm");
  return (state.x * rho).sum() / total;
}

Real mean_velocity(const GridState& state) {
  const ArrayXr w = state.values.abs2();
  const Real total = w.sum();
  if (!(total > 0)) throw std::invalid_argument("mean_velocity: state has zero norm");
  Real acc = 0;
  for (int k = 0; k < state.size(); ++k)
    acc += kinetic_derivative(state.spec, state.momenta[k]) * w[k];
  return acc / total;
}

}  // namespace qflux
