#pragma once

#include <cstdint>
#include <filesystem>

#include <Eigen/Core>

#include "hmc/mesh.hpp"

namespace hmc {

struct RandomFieldSpec {
    double mean = 1e-10;         ///< arithmetic mean of k, m^2
    double variance = 0.5;       ///< variance of ln k
    double lx = 5.0, ly = 1.0;   ///< correlation lengths, m
    std::uint64_t seed = 1;
};

/// Log-normal isotropic permeability per cell: a Gaussian field with covariance
/// var * exp(-|dx|/lx - |dy|/ly) at the centroids, exponentiated and rescaled
/// to the requested arithmetic mean.
Eigen::VectorXd generate_log_perm_field(const RandomFieldSpec& spec, const Mesh& mesh);

struct FieldRange {
    double min = 0.0, max = 0.0;
    double decades = 0.0;   ///< log10(max / min)
};
FieldRange field_range_report(const Eigen::VectorXd& field);

/// One value per line with a `cell,k` header.
void export_cell_field(const Eigen::VectorXd& field, const std::filesystem::path& path);
Eigen::VectorXd import_cell_field(const std::filesystem::path& path, int expected_cells);

} // namespace hmc
