#include "qflux/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

namespace qflux {

namespace {

using nlohmann::json;

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open for reading: " + path.string());
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open for writing: " + path.string());
  return out;
}

struct Row {
  std::vector<Real> fields;
};

std::vector<Row> read_csv(const std::filesystem::path& path, const std::string& header) {
  auto in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty CSV: " + path.string());
  if (line != header)
    throw std::invalid_argument("unexpected CSV header in " + path.string() + ": " + line);
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Row row;
    std::istringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) row.fields.push_back(std::stod(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

void check_uniform_symmetric(const ArrayXr& grid, const char* what) {
  const int n = static_cast<int>(grid.size());
  if (n < 2) throw std::invalid_argument(std::string(what) + ": need at least two rows");
  const Real step = grid[1] - grid[0];
  if (!(step > 0)) throw std::invalid_argument(std::string(what) + ": grid must ascend");
  const Real scale = std::max(Real(1), grid.abs().maxCoeff());
  for (int i = 1; i < n; ++i)
    if (std::abs(grid[i] - grid[i - 1] - step) > 1e-9 * scale)
      throw std::invalid_argument(std::string(what) + ": grid not uniform");
  if (std::abs(grid[0] + grid[n - 1]) > 1e-9 * scale)
    throw std::invalid_argument(std::string(what) + ": grid not symmetric about 0");
}

json read_json_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  json j;
  in >> j;
  return j;
}

}  // namespace

std::string format_full(Real value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

DeformationSpec read_spec_json(const std::filesystem::path& path) {
  const json j = read_json_file(path);
  const Real beta = j.at("beta").get<Real>();
  const Real hbar = j.value("hbar", Real(1));
  const Real mass = j.value("mass", Real(1));
  const auto coeffs = j.at("f_odd_coeffs").get<std::vector<Real>>();
  const Real bound = j.at("momentum_bound").get<Real>();
  return DeformationSpec::user_series(coeffs, beta, bound, hbar, mass);
}

void write_spec_json(const std::filesystem::path& path, const DeformationSpec& spec) {
  json j;
  j["beta"] = spec.beta();
  j["hbar"] = spec.hbar();
  j["mass"] = spec.mass();
  j["f_odd_coeffs"] = spec.odd_coeffs();
  j["momentum_bound"] = spec.momentum_bound();
  open_output(path) << j.dump(2) << '\n';
}

GridState read_grid_csv(const std::filesystem::path& path, const DeformationSpec& spec) {
  const auto rows = read_csv(path, "p,re,im");
  const int n = static_cast<int>(rows.size());
  ArrayXr p(n);
  ArrayXc c(n);
  for (int i = 0; i < n; ++i) {
    if (rows[i].fields.size() != 3)
      throw std::invalid_argument("grid CSV row needs three fields: " + path.string());
    p[i] = rows[i].fields[0];
    c[i] = Complex(rows[i].fields[1], rows[i].fields[2]);
  }
  check_uniform_symmetric(p, "read_grid_csv");
  GridState state;
  state.spec = spec;
  state.momenta = p;
  state.values = c;
  state.b_eff = p[n - 1] + (p[1] - p[0]) / 2;  // midpoint grid edge
  if (state.b_eff > spec.momentum_bound())
    throw std::domain_error("read_grid_csv: grid exceeds the momentum bound");
  return state;
}

void write_grid_csv(const std::filesystem::path& path, const GridState& state) {
  auto out = open_output(path);
  out << "p,re,im\n";
  for (int i = 0; i < state.size(); ++i)
    out << format_full(state.momenta[i]) << ',' << format_full(state.values[i].real()) << ','
        << format_full(state.values[i].imag()) << '\n';
}

CoordinateState read_coordinate_csv(const std::filesystem::path& path,
                                    const DeformationSpec& spec) {
  const auto rows = read_csv(path, "x,re,im");
  const int n = static_cast<int>(rows.size());
  ArrayXr x(n);
  ArrayXc v(n);
  for (int i = 0; i < n; ++i) {
    if (rows[i].fields.size() != 3)
      throw std::invalid_argument("coordinate CSV row needs three fields: " + path.string());
    x[i] = rows[i].fields[0];
    v[i] = Complex(rows[i].fields[1], rows[i].fields[2]);
  }
  check_uniform_symmetric(x, "read_coordinate_csv");
  CoordinateState state;
  state.spec = spec;
  state.x = x;
  state.values = v;
  state.b_eff = pi * spec.hbar() / (x[1] - x[0]);
  return state;
}

void write_coordinate_csv(const std::filesystem::path& path, const CoordinateState& state) {
  auto out = open_output(path);
  out << "x,re,im\n";
  for (int i = 0; i < state.size(); ++i)
    out << format_full(state.x[i]) << ',' << format_full(state.values[i].real()) << ','
        << format_full(state.values[i].imag()) << '\n';
}

SpectralState read_spectral_json(const std::filesystem::path& path, const DeformationSpec& spec) {
  const json j = read_json_file(path);
  SpectralState state(spec, j.value("t", Real(0)));
  for (const auto& comp : j.at("components"))
    state.add(comp.at("p").get<Real>(),
              Complex(comp.at("re").get<Real>(), comp.at("im").get<Real>()));
  return state;
}

void write_spectral_json(const std::filesystem::path& path, const SpectralState& state) {
  json comps = json::array();
  for (const auto& c : state.components())
    comps.push_back({{"p", c.p}, {"re", c.amplitude.real()}, {"im", c.amplitude.imag()}});
  json j;
  j["components"] = comps;
  j["t"] = state.time();
  open_output(path) << j.dump(2) << '\n';
}

void write_flux_profile(const std::filesystem::path& csv_path, const FluxProfile& profile) {
  {
    auto out = open_output(csv_path);
    out << "x,j\n";
    for (int i = 0; i < profile.x.size(); ++i)
      out << format_full(profile.x[i]) << ',' << format_full(profile.values[i]) << '\n';
  }
  json side;
  side["method"] = flux_method_name(profile.method);
  side["order"] = profile.method == FluxMethod::SeriesOrderN ? json(profile.order) : json(nullptr);
  side["t"] = profile.time;
  side["max_imag_residue"] = profile.max_imag_residue;
  side["truncation_estimate"] = std::isfinite(profile.truncation_estimate)
                                    ? json(profile.truncation_estimate)
                                    : json(nullptr);
  std::filesystem::path json_path = csv_path;
  json_path.replace_extension(".json");
  open_output(json_path) << side.dump(2) << '\n';
}

void write_residual_report(const std::filesystem::path& csv_path, const ResidualReport& report) {
  {
    auto out = open_output(csv_path);
    out << "x,residual\n";
    for (int i = 0; i < report.x.size(); ++i)
      out << format_full(report.x[i]) << ',' << format_full(report.values[i]) << '\n';
  }
  json side;
  side["max_abs"] = report.max_abs;
  side["l2"] = report.l2;
  side["rho_method"] = report.rho_method;
  side["j_method"] = report.current_method;
  side["dt_fd"] = std::isfinite(report.dt_fd) ? json(report.dt_fd) : json(nullptr);
  std::filesystem::path json_path = csv_path;
  json_path.replace_extension(".json");
  open_output(json_path) << side.dump(2) << '\n';
}

void write_coefficients_csv(const std::filesystem::path& path, const KineticCoefficients& coeffs) {
  auto out = open_output(path);
  out << "n,a\n";
  for (int n = 1; n <= coeffs.order(); ++n)
    out << n << ',' << format_full(coeffs.coeff(n)) << '\n';
}

}  // namespace qflux
