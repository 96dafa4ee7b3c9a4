#pragma once

#include <filesystem>
#include <string>

#include "qflux/algebra.hpp"
#include "qflux/evolution.hpp"
#include "qflux/flux.hpp"
#include "qflux/states.hpp"

namespace qflux {

/// Full round-trip precision (17 significant digits); golden files must not be
/// tolerance-fuzzed by formatting.
std::string format_full(Real value);

DeformationSpec read_spec_json(const std::filesystem::path& path);
void write_spec_json(const std::filesystem::path& path, const DeformationSpec& spec);

GridState read_grid_csv(const std::filesystem::path& path, const DeformationSpec& spec);
void write_grid_csv(const std::filesystem::path& path, const GridState& state);

CoordinateState read_coordinate_csv(const std::filesystem::path& path,
                                    const DeformationSpec& spec);
void write_coordinate_csv(const std::filesystem::path& path, const CoordinateState& state);

SpectralState read_spectral_json(const std::filesystem::path& path, const DeformationSpec& spec);
void write_spectral_json(const std::filesystem::path& path, const SpectralState& state);

/// CSV `x,j` plus a JSON sidecar (same stem, .json) with method, order, time,
/// imaginary residue, and truncation estimate.
void write_flux_profile(const std::filesystem::path& csv_path, const FluxProfile& profile);

/// CSV `x,residual` plus a JSON sidecar with the norms and method tags.
void write_residual_report(const std::filesystem::path& csv_path, const ResidualReport& report);

void write_coefficients_csv(const std::filesystem::path& path, const KineticCoefficients& coeffs);

}  // namespace qflux
