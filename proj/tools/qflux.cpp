// qflux: probability-flux computations for deformed Heisenberg algebras.
//
// Subcommands: coeffs, flux, residual, evolve. Exit codes: 0 success,
// 1 config/usage error, 2 tolerance breach, 3 numerical-health failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <variant>

#include "qflux/evolution.hpp"
#include "qflux/flux.hpp"
#include "qflux/io.hpp"
#include "qflux/run_config.hpp"

namespace {

using namespace qflux;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitTolerance = 2;
constexpr int kExitNumerical = 3;

fs::path ensure_out_dir(const RunConfig& config) {
  fs::path dir(config.out_dir);
  fs::create_directories(dir);
  return dir;
}

int check_grid_health(const GridState& state) {
  if (state.boundary_warning) {
    std::cerr << "qflux: aliasing guard tripped: momentum amplitude has not decayed at the "
                 "grid edge (raise b_eff)\n";
    return kExitNumerical;
  }
  return kExitOk;
}

int cmd_coeffs(const RunConfig& config) {
  if (config.order < 1) throw std::invalid_argument("coeffs: --order must be >= 1");
  const DeformationSpec spec = make_spec(config);
  const KineticCoefficients coeffs = taylor_coefficients(spec, config.order);

  const Real b = spec.momentum_bound();
  const Real p_scale =
      std::isfinite(config.b_eff) ? config.b_eff : (std::isfinite(b) ? b : Real(1));
  const Real estimate =
      series_truncation_estimate(coeffs, spec.beta(), spec.mass(), p_scale, config.order);

  for (int n = 1; n <= coeffs.order(); ++n)
    std::cout << "a_" << n << " = " << format_full(coeffs.coeff(n)) << '\n';
  std::cout << "truncation_estimate = " << format_full(estimate) << '\n';

  const fs::path dir = ensure_out_dir(config);
  write_coefficients_csv(dir / "coeffs.csv", coeffs);
  nlohmann::json side;
  side["order"] = config.order;
  side["a"] = coeffs.values();
  side["truncation_estimate"] = estimate;
  std::ofstream(dir / "coeffs.json") << side.dump(2) << '\n';
  return kExitOk;
}

int cmd_flux(const RunConfig& config) {
  const DeformationSpec spec = make_spec(config);
  const StateVariant state = make_state(config, spec);
  const fs::path dir = ensure_out_dir(config);

  if (std::holds_alternative<SpectralState>(state)) {
    if (config.method != "spectral" || config.compare)
      throw std::invalid_argument(
          "plane-wave superpositions support --method spectral (no --compare)");
    const auto& s = std::get<SpectralState>(state);
    const ArrayXr x = output_grid(config, spec, 0, true);
    const FluxProfile profile = flux_closed_spectral(s, x);
    write_flux_profile(dir / "flux_spectral.csv", profile);
    std::cout << "flux_spectral: " << profile.x.size() << " points, max |j| = "
              << format_full(profile.values.abs().maxCoeff()) << '\n';
    return kExitOk;
  }

  const auto& s = std::get<GridState>(state);
  if (int rc = check_grid_health(s); rc != kExitOk) return rc;
  const ArrayXr x = output_grid(config, spec, s.b_eff, false);

  const auto run_series = [&] {
    const CoordinateState psi = synthesize_coordinate(s);
    const KineticCoefficients coeffs = taylor_coefficients(spec, config.order);
    return flux_series(psi, coeffs, config.order, x);
  };
  const auto run_closed = [&] { return flux_closed_grid(s, x); };

  if (config.compare) {
    const FluxProfile series = run_series();
    const FluxProfile closed = run_closed();
    write_flux_profile(dir / "flux_series.csv", series);
    write_flux_profile(dir / "flux_closed.csv", closed);
    const ArrayXr diff = series.values - closed.values;
    {
      std::ofstream out(dir / "flux_diff.csv");
      out << "x,diff\n";
      for (int i = 0; i < x.size(); ++i)
        out << format_full(x[i]) << ',' << format_full(diff[i]) << '\n';
    }
    std::cout << "max |series - closed| = " << format_full(diff.abs().maxCoeff())
              << " (truncation estimate " << format_full(series.truncation_estimate) << ")\n";
    return kExitOk;
  }

  FluxProfile profile;
  if (config.method == "series")
    profile = run_series();
  else if (config.method == "closed")
    profile = run_closed();
  else
    throw std::invalid_argument("sampled states support --method series or closed");
  write_flux_profile(dir / ("flux_" + config.method + ".csv"), profile);
  std::cout << "flux_" << config.method << ": " << profile.x.size()
            << " points, max |j| = " << format_full(profile.values.abs().maxCoeff()) << '\n';
  return kExitOk;
}

int cmd_residual(const RunConfig& config) {
  const DeformationSpec spec = make_spec(config);
  const StateVariant state = make_state(config, spec);
  const fs::path dir = ensure_out_dir(config);

  ResidualOptions options;
  options.order_current = config.order;
  options.order_rho = config.order_rho >= 1 ? config.order_rho : config.order;
  options.allow_order_mismatch = config.order_rho >= 1;
  options.dt_fd = config.dt_fd;
  options.reference_oversample = config.ref_oversample;

  if (config.rho_method == "analytic")
    options.rho = RhoMethod::Analytic;
  else if (config.rho_method == "series")
    options.rho = RhoMethod::Series;
  else if (config.rho_method == "fd")
    options.rho = RhoMethod::TimeDifference;
  else
    throw std::invalid_argument("unknown --rho-method '" + config.rho_method + "'");

  ResidualReport report;
  if (std::holds_alternative<SpectralState>(state)) {
    if (config.method != "spectral")
      throw std::invalid_argument("plane-wave superpositions support --method spectral");
    options.current = CurrentMethod::ClosedSpectral;
    options.rho = RhoMethod::Analytic;
    const ArrayXr x = output_grid(config, spec, 0, true);
    report = continuity_residual(std::get<SpectralState>(state), x, options);
  } else {
    const auto& s = std::get<GridState>(state);
    if (int rc = check_grid_health(s); rc != kExitOk) return rc;
    if (config.method == "closed")
      options.current = CurrentMethod::ClosedGrid;
    else if (config.method == "series")
      options.current = CurrentMethod::Series;
    else
      throw std::invalid_argument("sampled states support --method series or closed");
    report = continuity_residual(s, options);
  }

  write_residual_report(dir / "residual.csv", report);
  std::cout << "residual: max |r| = " << format_full(report.max_abs)
            << ", L2 = " << format_full(report.l2) << " (rho " << report.rho_method
            << ", j " << report.current_method << ")\n";
  if (std::isfinite(config.tol) && report.max_abs > config.tol) {
    std::cerr << "qflux: residual exceeds tolerance " << format_full(config.tol) << '\n';
    return kExitTolerance;
  }
  return kExitOk;
}

int cmd_evolve(const RunConfig& config) {
  if (config.steps < 0) throw std::invalid_argument("evolve: --steps must be >= 0");
  if (config.snap_stride < 1) throw std::invalid_argument("evolve: --snap-stride must be >= 1");
  const DeformationSpec spec = make_spec(config);
  const StateVariant state = make_state(config, spec);
  const fs::path dir = ensure_out_dir(config);

  nlohmann::json manifest;
  manifest["dt"] = config.dt;
  manifest["steps"] = config.steps;
  manifest["snap_stride"] = config.snap_stride;
  manifest["potential"] = config.potential;
  auto files = nlohmann::json::array();
  auto times = nlohmann::json::array();
  auto mean_x = nlohmann::json::array();

  int snap_index = 0;
  const auto snapshot = [&](const CoordinateState& psi) {
    char name[32];
    std::snprintf(name, sizeof(name), "snap_%03d.csv", snap_index++);
    write_coordinate_csv(dir / name, psi);
    files.push_back(name);
    times.push_back(psi.time);
    mean_x.push_back(mean_position(psi));
  };

  if (config.potential == "none") {
    // Momentum-diagonal free evolution, exact in dt.
    GridState current = [&] {
      if (std::holds_alternative<GridState>(state)) return std::get<GridState>(state);
      // Sample a plane-wave superposition on the canonical grid for output.
      const auto& s = std::get<SpectralState>(state);
      const Real b_eff = effective_b_eff(config, spec);
      return to_momentum(sample_on_grid(s, config.grid_m, b_eff));
    }();
    if (int rc = check_grid_health(current); rc != kExitOk) return rc;
    snapshot(synthesize_coordinate(current));
    for (int step = 1; step <= config.steps; ++step) {
      current = evolve_free(current, config.dt);
      if (step % config.snap_stride == 0 || step == config.steps)
        snapshot(synthesize_coordinate(current));
    }
  } else {
    if (!std::holds_alternative<GridState>(state))
      throw std::invalid_argument("evolution with a potential needs a sampled state");
    const auto& s = std::get<GridState>(state);
    if (int rc = check_grid_health(s); rc != kExitOk) return rc;
    CoordinateState psi = synthesize_coordinate(s);
    const ArrayXr u = sample_potential(config, psi.x);
    snapshot(psi);
    for (int step = 1; step <= config.steps; ++step) {
      psi = evolve_split_step(psi, u, config.dt, 1);
      if (step % config.snap_stride == 0 || step == config.steps) snapshot(psi);
    }
  }

  manifest["files"] = files;
  manifest["times"] = times;
  manifest["mean_x"] = mean_x;
  std::ofstream(dir / "manifest.json") << manifest.dump(2) << '\n';
  std::cout << "evolve: wrote " << snap_index << " snapshots to " << dir.string() << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig config;

  // Config file first, so flags can override its values.
  for (int i = 1; i < argc - 1; ++i)
    if (std::string(argv[i]) == "--config") {
      try {
        load_config_json(argv[i + 1], config);
      } catch (const std::exception& e) {
        std::cerr << "qflux: " << e.what() << '\n';
        return kExitUsage;
      }
    }

  CLI::App app{"probability flux in spaces with a minimal length"};
  app.fallthrough(true);
  bool dump_config = false;
  std::string config_path;

  app.add_option("--config", config_path, "JSON config file (flags override its values)");
  app.add_flag("--dump-config", dump_config, "print the effective configuration and exit");
  app.add_option("--algebra", config.algebra, "undeformed | kempf-tan | path to spec JSON");
  app.add_option("--beta", config.beta, "deformation parameter");
  app.add_option("--hbar", config.hbar, "reduced Planck constant");
  app.add_option("--mass", config.mass, "particle mass");
  app.add_option("--state", config.state,
                 "gaussian:pbar=..,sigma=..[,x0=..] | plane:p0=..[,A=..,phi=..] | "
                 "two-wave:p1=..,p2=..[,A=..,B=..,phi1=..,phi2=..] | file.csv | file.json");
  app.add_option("--grid-m", config.grid_m, "momentum grid size (power of two)");
  app.add_option("--b-eff", config.b_eff, "effective momentum cutoff");
  app.add_option("--x-min", config.x_min, "output grid start");
  app.add_option("--x-max", config.x_max, "output grid end");
  app.add_option("--x-n", config.x_n, "output grid point count");
  app.add_option("--method", config.method, "series | closed | spectral");
  app.add_option("--order", config.order, "series truncation order");
  app.add_option("--rho-method", config.rho_method, "analytic | series | fd");
  app.add_option("--order-rho", config.order_rho, "series order for the density side");
  app.add_option("--dt-fd", config.dt_fd, "time step for the fd density route");
  app.add_option("--ref-oversample", config.ref_oversample,
                 "momentum oversampling for the analytic density route");
  app.add_option("--tol", config.tol, "residual tolerance (exit 2 when exceeded)");
  app.add_option("--out", config.out_dir, "output directory");
  app.add_flag("--compare", config.compare, "run series and closed forms and diff them");
  app.add_option("--dt", config.dt, "evolution time step");
  app.add_option("--steps", config.steps, "evolution step count");
  app.add_option("--snap-stride", config.snap_stride, "steps between snapshots");

  auto* coeffs_cmd = app.add_subcommand("coeffs", "kinetic-energy Taylor coefficients");
  auto* flux_cmd = app.add_subcommand("flux", "probability-flux profile");
  auto* residual_cmd = app.add_subcommand("residual", "continuity-equation residual");
  auto* evolve_cmd = app.add_subcommand("evolve", "time evolution with snapshots");
  app.require_subcommand(0, 1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  if (dump_config) {
    std::cout << dump_config_json(config) << '\n';
    return kExitOk;
  }

  try {
    if (coeffs_cmd->parsed()) return cmd_coeffs(config);
    if (flux_cmd->parsed()) return cmd_flux(config);
    if (residual_cmd->parsed()) return cmd_residual(config);
    if (evolve_cmd->parsed()) return cmd_evolve(config);
    std::cerr << "qflux: no subcommand given (try --help)\n";
    return kExitUsage;
  } catch (const numerical_error& e) {
    std::cerr << "qflux: numerical health failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "qflux: " << e.what() << '\n';
    return kExitUsage;
  }
}
