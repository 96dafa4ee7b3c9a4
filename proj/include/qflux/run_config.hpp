#pragma once

#include <filesystem>
#include <limits>
#include <string>
#include <variant>

#include "qflux/states.hpp"

namespace qflux {

/// One reproducible run: algebra, state recipe, grids, method selections and
/// output paths. A JSON config file provides values; command-line flags
/// override individual fields.
struct RunConfig {
  std::string algebra = "kempf-tan";  // built-in name or path to a JSON spec
  Real beta = 1;
  Real hbar = 1;
  Real mass = 1;

  std::string state;  // recipe (gaussian:..., plane:..., two-wave:...) or file path

  int grid_m = 512;  // power of two
  Real b_eff = std::numeric_limits<Real>::quiet_NaN();  // default: 0.9 b when b finite

  Real x_min = std::numeric_limits<Real>::quiet_NaN();
  Real x_max = std::numeric_limits<Real>::quiet_NaN();
  int x_n = 0;

  std::string method = "closed";  // series | closed | spectral
  int order = 16;
  std::string rho_method = "analytic";  // analytic | series | fd
  int order_rho = -1;                   // -1: follow `order`
  Real dt_fd = std::numeric_limits<Real>::quiet_NaN();
  int ref_oversample = 1;

  Real tol = std::numeric_limits<Real>::quiet_NaN();
  std::string out_dir = "out";
  bool compare = false;

  Real dt = 0.01;
  int steps = 100;
  int snap_stride = 10;
  std::string potential = "none";  // none | harmonic:k=...
};

void load_config_json(const std::filesystem::path& path, RunConfig& config);
std::string dump_config_json(const RunConfig& config);

DeformationSpec make_spec(const RunConfig& config);
Real effective_b_eff(const RunConfig& config, const DeformationSpec& spec);

using StateVariant = std::variant<GridState, SpectralState>;
StateVariant make_state(const RunConfig& config, const DeformationSpec& spec);

/// Coordinate nodes for flux/residual output: the canonical grid for sampled
/// states, an explicit symmetric window for plane-wave superpositions, either
/// overridable through the x_* fields.
ArrayXr output_grid(const RunConfig& config, const DeformationSpec& spec, Real b_eff,
                    bool spectral_state);

ArrayXr sample_potential(const RunConfig& config, const ArrayXr& x);

}  // namespace qflux
