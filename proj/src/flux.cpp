#include "qflux/flux.hpp"

#include <cmath>
#include <vector>

namespace qflux {

namespace {

constexpr Complex kImagUnit{0, 1};

MatrixXc synthesis_matrix(const ArrayXr& x, const ArrayXr& p, Real hbar) {
  Eigen::MatrixXd phase = (x.matrix() * p.matrix().transpose()) / hbar;
  return (kImagUnit * phase.array().cast<Complex>()).exp().matrix();
}

// Residue guard. The tolerance combines the spec'd relative bound with a tiny
// floor in units of the accumulated term magnitude, so identically-zero
// profiles (real psi) do not trip on their own rounding noise.
void check_reality(const ArrayXc& values, Real term_scale, const char* who) {
  const Real residue = values.imag().abs().maxCoeff();
  const Real tol = 1e-10 * values.real().abs().maxCoeff() + 1e-13 * term_scale;
  if (residue > tol)
    throw numerical_error(std::string(who) + ": imaginary residue " +
                          std::to_string(residue) + " exceeds tolerance");
}

}  // namespace

const char* flux_method_name(FluxMethod method) {
  switch (method) {
    case FluxMethod::SeriesOrderN: return "series";
    case FluxMethod::ClosedGrid: return "closed";
    case FluxMethod::ClosedSpectral: return "spectral";
    case FluxMethod::Analytic: return "analytic";
  }
  return "unknown";
}

Real series_truncation_estimate(const KineticCoefficients& coeffs, Real beta, Real mass,
                                Real p_max, int n_terms) {
  return std::abs(coeffs.coeff(n_terms) * std::pow(beta, n_terms - 1) *
                  std::pow(p_max, 2 * n_terms)) /
         (2 * mass);
}

FluxProfile flux_series(const CoordinateState& psi, const KineticCoefficients& coeffs,
                        int n_terms) {
  return flux_series(psi, coeffs, n_terms, psi.x);
}

FluxProfile flux_series(const CoordinateState& psi, const KineticCoefficients& coeffs,
                        int n_terms, const ArrayXr& x) {
  if (n_terms < 1 || n_terms > coeffs.order())
    throw std::invalid_argument("flux_series: order exceeds available coefficients");
  const Real beta = psi.spec.beta();
  const Real mass = psi.spec.mass();
  const Real hbar = psi.spec.hbar();
  const int n_powers = 2 * n_terms;  // momentum powers 0..2N-1

  const GridState g = to_momentum(psi);
  const int m = g.size();

  // Momentum content of psi and of conj(psi); the latter is the reflected
  // conjugate on the symmetric grid.
  Eigen::VectorXcd c = g.values.matrix();
  Eigen::VectorXcd cc = g.values.conjugate().reverse().matrix();

  // All operator powers in one synthesis: columns m of D are samples of
  // p-hat^m psi, columns of E the same for conj(psi).
  MatrixXc coef_d(m, n_powers), coef_e(m, n_powers);
  ArrayXc pw = ArrayXc::Ones(m);
  for (int k = 0; k < n_powers; ++k) {
    coef_d.col(k) = c.array() * pw;
    coef_e.col(k) = cc.array() * pw;
    pw *= g.momenta.cast<Complex>();
  }
  const MatrixXc synth = g.dp() * synthesis_matrix(x, g.momenta, hbar);
  const MatrixXc d = synth * coef_d;
  const MatrixXc e = synth * coef_e;

  ArrayXc acc = ArrayXc::Zero(x.size());
  Real term_scale = 0;
  Real beta_pow = 1;
  for (int n = 1; n <= n_terms; ++n) {
    const Real a = coeffs.coeff(n) * beta_pow;
    Real sign = 1;
    for (int k = 1; k <= n; ++k) {
      const ArrayXc bracket = e.col(k - 1).array() * d.col(2 * n - k).array() -
                              d.col(k - 1).array() * e.col(2 * n - k).array();
      acc += (a * sign) * bracket;
      term_scale = std::max(
          term_scale, std::abs(a) * (e.col(k - 1).array() * d.col(2 * n - k).array())
                                        .abs()
                                        .maxCoeff() * 2);
      sign = -sign;
    }
    beta_pow *= beta;
  }
  acc /= 2 * mass;
  term_scale /= 2 * mass;
  check_reality(acc, term_scale, "flux_series");

  FluxProfile out;
  out.x = x;
  out.values = acc.real();
  out.method = FluxMethod::SeriesOrderN;
  out.order = n_terms;
  out.time = psi.time;
  out.max_imag_residue = acc.imag().abs().maxCoeff();
  out.truncation_estimate = series_truncation_estimate(coeffs, beta, mass, psi.b_eff, n_terms);
  return out;
}

ArrayXc closed_grid_spectrum(const GridState& state) {
  const DeformationSpec& spec = state.spec;
  const int m = state.size();
  const Real dp = state.dp();
  const Real eps = default_diagonal_threshold(spec);

  ArrayXr energy(m), velocity(m);
  for (int k = 0; k < m; ++k) {
    energy[k] = kinetic_energy(spec, state.momenta[k]);
    velocity[k] = kinetic_derivative(spec, state.momenta[k]);
  }
  const ArrayXc g = state.values * dp;

  ArrayXc spectrum = ArrayXc::Zero(m);
  spectrum[0] = (g.abs2() * velocity).sum();  // diagonal: kernel = T'(p_k)
  for (int d = 1; d < m; ++d) {
    Complex acc{0, 0};
    const Real diff = d * dp;
    if (diff <= eps) {
      for (int k = d; k < m; ++k)
        acc += g[k] * std::conj(g[k - d]) *
               kinetic_derivative(spec, (state.momenta[k] + state.momenta[k - d]) / 2);
    } else {
      for (int k = d; k < m; ++k)
        acc += g[k] * std::conj(g[k - d]) * ((energy[k] - energy[k - d]) / diff);
    }
    spectrum[d] = acc;
  }
  return spectrum;
}

namespace {

// j(x) = S_0 + 2 Re sum_{d>=1} S_d e^{i d dp x / hbar}, with an optional
// factor (i d dp / hbar)^deriv for the spatial derivative.
ArrayXr synthesize_difference_spectrum(const ArrayXc& spectrum, Real dp, Real hbar,
                                       const ArrayXr& x, int deriv) {
  const int m = static_cast<int>(spectrum.size());
  ArrayXc spec = spectrum;
  if (deriv > 0)
    for (int d = 0; d < m; ++d)
      spec[d] *= std::pow(kImagUnit * (d * dp / hbar), deriv);
  ArrayXr out(x.size());
  for (int j = 0; j < x.size(); ++j) {
    const Complex w = std::exp(kImagUnit * (dp * x[j] / hbar));
    Complex s{0, 0};
    for (int d = m - 1; d >= 1; --d) s = (s + spec[d]) * w;
    out[j] = spec[0].real() + 2 * s.real();
  }
  return out;
}

}  // namespace

FluxProfile flux_closed_grid(const GridState& state, const ArrayXr& x) {
  const ArrayXc spectrum = closed_grid_spectrum(state);
  FluxProfile out;
  out.x = x;
  out.values = synthesize_difference_spectrum(spectrum, state.dp(), state.spec.hbar(), x, 0);
  out.method = FluxMethod::ClosedGrid;
  out.time = state.time;
  out.max_imag_residue = 0;  // symmetrized sum is real by construction
  return out;
}

FluxProfile flux_closed_grid(const GridState& state, const ArrayXr& x,
                             const DeformationSpec& kernel_spec) {
  if (kernel_spec != state.spec)
    throw std::invalid_argument("flux_closed_grid: kernel spec disagrees with the state's");
  return flux_closed_grid(state, x);
}

ArrayXr flux_closed_grid_dx(const GridState& state, const ArrayXr& x) {
  const ArrayXc spectrum = closed_grid_spectrum(state);
  return synthesize_difference_spectrum(spectrum, state.dp(), state.spec.hbar(), x, 1);
}

FluxProfile flux_closed_spectral(const SpectralState& state, const ArrayXr& x) {
  const DeformationSpec& spec = state.spec();
  const Real hbar = spec.hbar();
  const auto& comps = state.components();

  Real constant = 0;
  for (const auto& c : comps)
    constant += std::norm(c.amplitude) * kinetic_derivative(spec, c.p);

  ArrayXr j = ArrayXr::Constant(x.size(), constant);
  for (std::size_t i = 0; i < comps.size(); ++i) {
    for (std::size_t l = i + 1; l < comps.size(); ++l) {
      const Real kernel = divided_difference_kernel(spec, comps[i].p, comps[l].p);
      const Complex cross = comps[i].amplitude * std::conj(comps[l].amplitude);
      const Real dpx = (comps[i].p - comps[l].p) / hbar;
      j += 2 * kernel *
           (cross * (kImagUnit * dpx * x.cast<Complex>()).exp()).real();
    }
  }

  FluxProfile out;
  out.x = x;
  out.values = j;
  out.method = FluxMethod::ClosedSpectral;
  out.time = state.time();
  out.max_imag_residue = 0;
  return out;
}

FluxProfile flux_closed_spectral(const SpectralState& state, const ArrayXr& x, Real time) {
  SpectralState advanced(state.spec(), time);
  const Real dt = time - state.time();
  for (const auto& c : state.components()) {
    const Complex phase =
        std::exp(-kImagUnit * kinetic_energy(state.spec(), c.p) * dt / state.spec().hbar());
    advanced.add(c.p, c.amplitude * phase);
  }
  return flux_closed_spectral(advanced, x);
}

Real flux_plane_wave(const DeformationSpec& spec, Complex amplitude, Real p0) {
  return std::norm(amplitude) * kinetic_derivative(spec, p0);
}

GeometricSumPair geometric_sum_identity(Real p, Real q, int n) {
  if (n < 1) throw std::invalid_argument("geometric_sum_identity: n must be >= 1");
  Real summed = 0;
  for (int k = 1; k <= n; ++k)
    summed += std::pow(q, k - 1) * std::pow(p, 2 * n - k) +
              std::pow(p, k - 1) * std::pow(q, 2 * n - k);
  const Real quotient = (p == q) ? 2 * n * std::pow(p, 2 * n - 1)
                                 : (std::pow(p, 2 * n) - std::pow(q, 2 * n)) / (p - q);
  return {summed, quotient};
}

}  // namespace qflux
