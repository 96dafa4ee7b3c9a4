#include "qflux/run_config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "qflux/io.hpp"

namespace qflux {

namespace {

using nlohmann::json;

template <typename T>
void maybe_get(const json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) out = it->get<T>();
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

std::map<std::string, Real> parse_recipe_params(const std::string& body,
                                                const std::string& recipe) {
  std::map<std::string, Real> params;
  std::istringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("state recipe '" + recipe + "': expected key=value, got '" +
                                  item + "'");
    params[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
  }
  return params;
}

Real take(std::map<std::string, Real>& params, const std::string& key) {
  const auto it = params.find(key);
  if (it == params.end())
    throw std::invalid_argument("state recipe missing parameter '" + key + "'");
  const Real v = it->second;
  params.erase(it);
  return v;
}

Real take_or(std::map<std::string, Real>& params, const std::string& key, Real fallback) {
  const auto it = params.find(key);
  if (it == params.end()) return fallback;
  const Real v = it->second;
  params.erase(it);
  return v;
}

void expect_empty(const std::map<std::string, Real>& params, const std::string& recipe) {
  if (!params.empty())
    throw std::invalid_argument("state recipe '" + recipe + "': unknown parameter '" +
                                params.begin()->first + "'");
}

}  // namespace

void load_config_json(const std::filesystem::path& path, RunConfig& config) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path.string());
  json j;
  in >> j;
  maybe_get(j, "algebra", config.algebra);
  maybe_get(j, "beta", config.beta);
  maybe_get(j, "hbar", config.hbar);
  maybe_get(j, "mass", config.mass);
  maybe_get(j, "state", config.state);
  maybe_get(j, "grid_m", config.grid_m);
  maybe_get(j, "b_eff", config.b_eff);
  maybe_get(j, "x_min", config.x_min);
  maybe_get(j, "x_max", config.x_max);
  maybe_get(j, "x_n", config.x_n);
  maybe_get(j, "method", config.method);
  maybe_get(j, "order", config.order);
  maybe_get(j, "rho_method", config.rho_method);
  maybe_get(j, "order_rho", config.order_rho);
  maybe_get(j, "dt_fd", config.dt_fd);
  maybe_get(j, "ref_oversample", config.ref_oversample);
  maybe_get(j, "tol", config.tol);
  maybe_get(j, "out_dir", config.out_dir);
  maybe_get(j, "compare", config.compare);
  maybe_get(j, "dt", config.dt);
  maybe_get(j, "steps", config.steps);
  maybe_get(j, "snap_stride", config.snap_stride);
  maybe_get(j, "potential", config.potential);
}

std::string dump_config_json(const RunConfig& config) {
  json j;
  j["algebra"] = config.algebra;
  j["beta"] = config.beta;
  j["hbar"] = config.hbar;
  j["mass"] = config.mass;
  j["state"] = config.state;
  j["grid_m"] = config.grid_m;
  j["b_eff"] = std::isfinite(config.b_eff) ? json(config.b_eff) : json(nullptr);
  j["x_min"] = std::isfinite(config.x_min) ? json(config.x_min) : json(nullptr);
  j["x_max"] = std::isfinite(config.x_max) ? json(config.x_max) : json(nullptr);
  j["x_n"] = config.x_n;
  j["method"] = config.method;
  j["order"] = config.order;
  j["rho_method"] = config.rho_method;
  j["order_rho"] = config.order_rho;
  j["dt_fd"] = std::isfinite(config.dt_fd) ? json(config.dt_fd) : json(nullptr);
  j["ref_oversample"] = config.ref_oversample;
  j["tol"] = std::isfinite(config.tol) ? json(config.tol) : json(nullptr);
  j["out_dir"] = config.out_dir;
  j["compare"] = config.compare;
  j["dt"] = config.dt;
  j["steps"] = config.steps;
  j["snap_stride"] = config.snap_stride;
  j["potential"] = config.potential;
  return j.dump(2);
}

DeformationSpec make_spec(const RunConfig& config) {
  if (config.algebra == "undeformed")
    return DeformationSpec::undeformed(config.hbar, config.mass);
  if (config.algebra == "kempf-tan")
    return DeformationSpec::kempf_tan(config.beta, config.hbar, config.mass);
  if (config.algebra.size() > 5 &&
      config.algebra.substr(config.algebra.size() - 5) == ".json")
    return read_spec_json(config.algebra);
  throw std::invalid_argument("unknown algebra '" + config.algebra +
                              "' (expected undeformed, kempf-tan, or a .json path)");
}

Real effective_b_eff(const RunConfig& config, const DeformationSpec& spec) {
  if (std::isfinite(config.b_eff)) {
    if (!(config.b_eff > 0)) throw std::invalid_argument("b_eff must be positive");
    return config.b_eff;
  }
  const Real b = spec.momentum_bound();
  if (!std::isfinite(b))
    throw std::invalid_argument("b_eff is required for an unbounded momentum domain");
  return Real(0.9) * b;
}

StateVariant make_state(const RunConfig& config, const DeformationSpec& spec) {
  const std::string& s = config.state;
  if (s.empty()) throw std::invalid_argument("no state given (--state)");

  const auto colon = s.find(':');
  const std::string head = colon == std::string::npos ? s : s.substr(0, colon);
  const std::string body = colon == std::string::npos ? "" : s.substr(colon + 1);

  if (head == "gaussian") {
    if (!is_power_of_two(config.grid_m))
      throw std::invalid_argument("grid_m must be a power of two");
    auto params = parse_recipe_params(body, s);
    const Real p_mean = take(params, "pbar");
    const Real sigma = take(params, "sigma");
    const Real x0 = take_or(params, "x0", 0);
    expect_empty(params, s);
    return gaussian_packet(spec, config.grid_m, effective_b_eff(config, spec), p_mean, sigma, x0);
  }
  if (head == "plane") {
    auto params = parse_recipe_params(body, s);
    const Real p0 = take(params, "p0");
    const Real a = take_or(params, "A", 1);
    const Real phi = take_or(params, "phi", 0);
    expect_empty(params, s);
    return plane_wave(spec, std::polar(a, phi), p0);
  }
  if (head == "two-wave") {
    auto params = parse_recipe_params(body, s);
    const Real p1 = take(params, "p1");
    const Real p2 = take(params, "p2");
    const Real a = take_or(params, "A", 1);
    const Real b = take_or(params, "B", 1);
    const Real phi1 = take_or(params, "phi1", 0);
    const Real phi2 = take_or(params, "phi2", 0);
    expect_empty(params, s);
    SpectralState state(spec);
    state.add(p1, std::polar(a, phi1));
    state.add(p2, std::polar(b, phi2));
    return state;
  }

  const std::filesystem::path path(s);
  if (path.extension() == ".json") return read_spectral_json(path, spec);
  if (path.extension() == ".csv") return read_grid_csv(path, spec);
  throw std::invalid_argument("unrecognized state '" + s +
                              "' (expected gaussian:, plane:, two-wave:, or a .csv/.json path)");
}

ArrayXr output_grid(const RunConfig& config, const DeformationSpec& spec, Real b_eff,
                    bool spectral_state) {
  if (std::isfinite(config.x_min) || std::isfinite(config.x_max) || config.x_n > 0) {
    if (!(std::isfinite(config.x_min) && std::isfinite(config.x_max) && config.x_n > 1))
      throw std::invalid_argument("explicit output grid needs x_min, x_max and x_n > 1");
    if (!(config.x_max > config.x_min))
      throw std::invalid_argument("x_max must exceed x_min");
    ArrayXr x(config.x_n);
    const Real step = (config.x_max - config.x_min) / (config.x_n - 1);
    for (int i = 0; i < config.x_n; ++i) x[i] = config.x_min + i * step;
    return x;
  }
  if (spectral_state) {
    ArrayXr x(1001);
    for (int i = 0; i < 1001; ++i) x[i] = -20.0 + 0.04 * i;
    return x;
  }
  return coordinate_grid(config.grid_m, b_eff, spec.hbar());
}

ArrayXr sample_potential(const RunConfig& config, const ArrayXr& x) {
  if (config.potential == "none") return ArrayXr::Zero(x.size());
  const auto colon = config.potential.find(':');
  const std::string head =
      colon == std::string::npos ? config.potential : config.potential.substr(0, colon);
  if (head == "harmonic") {
    auto params = parse_recipe_params(
        colon == std::string::npos ? "" : config.potential.substr(colon + 1), config.potential);
    const Real k = take_or(params, "k", 1);
    expect_empty(params, config.potential);
    return Real(0.5) * k * x.square();
  }
  if (head == "constant") {
    auto params = parse_recipe_params(
        colon == std::string::npos ? "" : config.potential.substr(colon + 1), config.potential);
    const Real c = take_or(params, "c", 0);
    expect_empty(params, config.potential);
    return ArrayXr::Constant(x.size(), c);
  }
  throw std::invalid_argument("unknown potential '" + config.potential + "'");
}

}  // namespace qflux
