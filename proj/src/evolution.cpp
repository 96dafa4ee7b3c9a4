#include "qflux/evolution.hpp"

#include <cmath>
#include <sstream>

namespace qflux {

namespace {

constexpr Complex kImagUnit{0, 1};

ArrayXr kinetic_on_grid(const DeformationSpec& spec, const ArrayXr& momenta) {
  ArrayXr t(momenta.size());
  for (int k = 0; k < momenta.size(); ++k) t[k] = kinetic_energy(spec, momenta[k]);
  return t;
}

std::string format_order(const char* name, int order) {
  std::ostringstream os;
  os << name << "(N=" << order << ")";
  return os.str();
}

}  // namespace

GridState evolve_free(const GridState& state, Real dt) {
  GridState out = state;
  const ArrayXr t = kinetic_on_grid(state.spec, state.momenta);
  out.values = state.values * (-kImagUnit * (dt / state.spec.hbar()) * t.cast<Complex>()).exp();
  out.time = state.time + dt;
  return out;
}

SpectralState evolve_free(const SpectralState& state, Real dt) {
  SpectralState out(state.spec(), state.time() + dt);
  for (const auto& c : state.components()) {
    const Complex phase = std::exp(-kImagUnit * kinetic_energy(state.spec(), c.p) * dt /
                                   state.spec().hbar());
    out.add(c.p, c.amplitude * phase);
  }
  return out;
}

CoordinateState evolve_split_step(const CoordinateState& psi, const ArrayXr& potential,
                                  Real dt, int steps) {
  if (potential.size() != psi.x.size())
    throw std::invalid_argument("evolve_split_step: potential not sampled on psi's grid");
  if (steps < 0) throw std::invalid_argument("evolve_split_step: negative step count");

  const Real hbar = psi.spec.hbar();
  const ArrayXc half_kick = (-kImagUnit * (dt / (2 * hbar)) * potential.cast<Complex>()).exp();
  CoordinateState state = psi;
  ArrayXc kinetic_phase;
  for (int s = 0; s < steps; ++s) {
    state.values *= half_kick;
    GridState g = to_momentum(state);
    if (kinetic_phase.size() == 0) {
      const ArrayXr t = kinetic_on_grid(g.spec, g.momenta);
      kinetic_phase = (-kImagUnit * (dt / hbar) * t.cast<Complex>()).exp();
    }
    g.values *= kinetic_phase;
    state.values = synthesize_at(g, state.x);
    state.values *= half_kick;
    state.time += dt;
  }
  return state;
}

ArrayXr drho_dt(const CoordinateState& psi, const KineticCoefficients& coeffs, int n_terms) {
  return drho_dt(psi, coeffs, n_terms, psi.x);
}

ArrayXr drho_dt(const CoordinateState& psi, const KineticCoefficients& coeffs, int n_terms,
                const ArrayXr& x) {
  if (n_terms < 1 || n_terms > coeffs.order())
    throw std::invalid_argument("drho_dt: order exceeds available coefficients");
  const Real beta = psi.spec.beta();
  const Real mass = psi.spec.mass();
  const Real hbar = psi.spec.hbar();

  const GridState g = to_momentum(psi);
  const int m = g.size();
  Eigen::VectorXcd c = g.values.matrix();
  Eigen::VectorXcd cc = g.values.conjugate().reverse().matrix();

  // Even operator powers 0, 2, ..., 2N of both psi and conj(psi).
  MatrixXc coef_d(m, n_terms + 1), coef_e(m, n_terms + 1);
  ArrayXc pw = ArrayXc::Ones(m);
  const ArrayXc p2 = g.momenta.square().cast<Complex>();
  for (int n = 0; n <= n_terms; ++n) {
    coef_d.col(n) = c.array() * pw;
    coef_e.col(n) = cc.array() * pw;
    pw *= p2;
  }
  const MatrixXc synth = g.dp() * (kImagUnit * ((x.matrix() * g.momenta.matrix().transpose()) / hbar)
                                       .array()
                                       .cast<Complex>())
                                      .exp()
                                      .matrix();
  const MatrixXc d = synth * coef_d;
  const MatrixXc e = synth * coef_e;

  ArrayXc acc = ArrayXc::Zero(x.size());
  Real term_scale = 0;
  Real beta_pow = 1;
  for (int n = 1; n <= n_terms; ++n) {
    const Real a = coeffs.coeff(n) * beta_pow;
    acc += a * (e.col(0).array() * d.col(n).array() - d.col(0).array() * e.col(n).array());
    term_scale = std::max(term_scale,
                          2 * std::abs(a) * (e.col(0).array() * d.col(n).array()).abs().maxCoeff());
    beta_pow *= beta;
  }
  // Divide by 2 m i hbar.
  acc *= Complex(0, -1) / (2 * mass * hbar);
  term_scale /= 2 * mass * hbar;

  const Real residue = acc.imag().abs().maxCoeff();
  if (residue > 1e-10 * acc.real().abs().maxCoeff() + 1e-13 * term_scale)
    throw numerical_error("drho_dt: imaginary residue exceeds tolerance");
  return acc.real();
}

namespace {

// Spectral derivative of a real band-limited profile sampled on the canonical
// residual grid: bandwidth 2 b_eff, integer difference frequencies d * dp.
ArrayXr residual_grid_derivative(const ArrayXr& samples, const ArrayXr& x, Real b_eff,
                                 int m, Real hbar) {
  const int l = static_cast<int>(samples.size());
  if (l != 2 * m)
    throw std::invalid_argument("residual_grid_derivative: sample count mismatch");
  const Real dp = 2 * b_eff / m;

  // Frequencies d = -m .. m-1 (index offset m).
  ArrayXc freq = ArrayXc::Zero(2 * m);
  for (int j = 0; j < l; ++j) {
    const Complex step = std::exp(-kImagUnit * (dp * x[j] / hbar));
    Complex ph = std::exp(kImagUnit * (Real(m) * dp * x[j] / hbar));
    for (int idx = 0; idx < 2 * m; ++idx) {
      freq[idx] += samples[j] * ph;
      ph *= step;
    }
  }
  freq /= Real(l);

  ArrayXr out(l);
  for (int j = 0; j < l; ++j) {
    const Complex step = std::exp(kImagUnit * (dp * x[j] / hbar));
    Complex ph = std::exp(-kImagUnit * (Real(m) * dp * x[j] / hbar));
    Complex acc{0, 0};
    for (int idx = 0; idx < 2 * m; ++idx) {
      const Real s = (idx - m) * dp;
      acc += freq[idx] * (kImagUnit * s / hbar) * ph;
      ph *= step;
    }
    out[j] = acc.real();
  }
  return out;
}

ArrayXc sample_amplitude_with_phase(const DeformationSpec& spec,
                                    const std::function<Complex(Real)>& amplitude,
                                    const ArrayXr& momenta, Real time) {
  ArrayXc c(momenta.size());
  for (int k = 0; k < momenta.size(); ++k) {
    const Real t_k = kinetic_energy(spec, momenta[k]);
    c[k] = amplitude(momenta[k]) * std::exp(-kImagUnit * t_k * time / spec.hbar());
  }
  return c;
}

ArrayXr analytic_drho_dt_from_samples(const DeformationSpec& spec, const ArrayXr& momenta,
                                      const ArrayXc& values, Real dp, const ArrayXr& x) {
  const Real hbar = spec.hbar();
  const ArrayXr t = kinetic_on_grid(spec, momenta);
  const MatrixXc synth =
      (kImagUnit * ((x.matrix() * momenta.matrix().transpose()) / hbar).array().cast<Complex>())
          .exp()
          .matrix();
  const ArrayXc psi = dp * (synth * values.matrix()).array();
  const ArrayXc dpsi_dt =
      dp * (synth * (values * (-kImagUnit / hbar) * t.cast<Complex>()).matrix()).array();
  return 2 * (psi.conjugate() * dpsi_dt).real();
}

}  // namespace

ResidualReport continuity_residual(const GridState& state, const ResidualOptions& options) {
  if (options.current == CurrentMethod::ClosedSpectral)
    throw std::invalid_argument("continuity_residual: spectral current needs a spectral state");
  if (options.rho == RhoMethod::Series && options.current == CurrentMethod::Series &&
      options.order_rho != options.order_current && !options.allow_order_mismatch)
    throw std::invalid_argument(
        "continuity_residual: series orders differ between the two sides");

  const DeformationSpec& spec = state.spec;
  const Real hbar = spec.hbar();
  const int m = state.size();
  const ArrayXr x = residual_grid(m, state.b_eff, hbar);

  ResidualReport report;
  report.x = x;

  ArrayXr djdx;
  switch (options.current) {
    case CurrentMethod::ClosedGrid:
      djdx = flux_closed_grid_dx(state, x);
      report.current_method = "closed";
      break;
    case CurrentMethod::Series: {
      const CoordinateState psi = synthesize_coordinate(state);
      const auto coeffs = taylor_coefficients(spec, options.order_current);
      const FluxProfile j = flux_series(psi, coeffs, options.order_current, x);
      djdx = residual_grid_derivative(j.values, x, state.b_eff, m, hbar);
      report.current_method = format_order("series", options.order_current);
      break;
    }
    case CurrentMethod::ClosedSpectral:
      throw std::logic_error("unreachable");
  }

  ArrayXr rhodot;
  switch (options.rho) {
    case RhoMethod::Analytic: {
      if (options.reference_oversample > 1) {
        if (!state.continuum)
          throw std::invalid_argument(
              "continuity_residual: reference oversampling needs a continuum amplitude");
        const int m_ref = m * options.reference_oversample;
        const ArrayXr momenta = momentum_grid(m_ref, state.b_eff);
        const ArrayXc values =
            sample_amplitude_with_phase(spec, state.continuum, momenta, state.time);
        rhodot = analytic_drho_dt_from_samples(spec, momenta, values,
                                               2 * state.b_eff / m_ref, x);
        std::ostringstream os;
        os << "analytic(ref=" << options.reference_oversample << ")";
        report.rho_method = os.str();
      } else {
        rhodot = analytic_drho_dt_from_samples(spec, state.momenta, state.values, state.dp(), x);
        report.rho_method = "analytic";
      }
      break;
    }
    case RhoMethod::Series: {
      const CoordinateState psi = synthesize_coordinate(state);
      const auto coeffs = taylor_coefficients(spec, options.order_rho);
      rhodot = drho_dt(psi, coeffs, options.order_rho, x);
      report.rho_method = format_order("series", options.order_rho);
      break;
    }
    case RhoMethod::TimeDifference: {
      Real dt = options.dt_fd;
      if (!std::isfinite(dt)) {
        const Real t_max = kinetic_on_grid(spec, state.momenta).abs().maxCoeff();
        dt = 1e-5 * hbar / std::max(t_max, Real(1));
      }
      const ArrayXc plus = synthesize_at(evolve_free(state, dt), x);
      const ArrayXc minus = synthesize_at(evolve_free(state, -dt), x);
      rhodot = (plus.abs2() - minus.abs2()) / (2 * dt);
      std::ostringstream os;
      os << "fd(dt=" << dt << ")";
      report.rho_method = os.str();
      report.dt_fd = dt;
      break;
    }
  }

  report.values = rhodot + djdx;
  report.max_abs = report.values.abs().maxCoeff();
  report.l2 = std::sqrt(report.values.square().sum() * (x[1] - x[0]));
  return report;
}

ResidualReport continuity_residual(const SpectralState& state, const ArrayXr& x,
                                   const ResidualOptions& options) {
  if (options.rho != RhoMethod::Analytic || options.current != CurrentMethod::ClosedSpectral)
    throw std::invalid_argument(
        "continuity_residual: spectral states support the analytic/spectral route only");

  const DeformationSpec& spec = state.spec();
  const Real hbar = spec.hbar();
  const auto& comps = state.components();

  ArrayXr r = ArrayXr::Zero(x.size());
  for (std::size_t i = 0; i < comps.size(); ++i) {
    for (std::size_t l = i + 1; l < comps.size(); ++l) {
      const Real delta_p = comps[i].p - comps[l].p;
      const Real delta_t =
          kinetic_energy(spec, comps[i].p) - kinetic_energy(spec, comps[l].p);
      const Real kernel = divided_difference_kernel(spec, comps[i].p, comps[l].p);
      const Complex cross = comps[i].amplitude * std::conj(comps[l].amplitude);
      const ArrayXc wave = (kImagUnit * (delta_p / hbar) * x.cast<Complex>()).exp();
      // d(rho)/dt contributes -i delta_T / hbar, d(j)/dx contributes
      // +i K delta_p / hbar; they cancel to rounding.
      r += 2 * ((kImagUnit / hbar) * (kernel * delta_p - delta_t) * cross * wave).real();
    }
  }

  ResidualReport report;
  report.x = x;
  report.values = r;
  report.max_abs = r.abs().maxCoeff();
  const Real dx = x.size() > 1 ? x[1] - x[0] : Real(1);
  report.l2 = std::sqrt(r.square().sum() * dx);
  report.rho_method = "analytic";
  report.current_method = "spectral";
  return report;
}

}  // namespace qflux
