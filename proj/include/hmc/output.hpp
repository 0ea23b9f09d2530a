#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hmc/mesh.hpp"

namespace hmc {

/// Fields written to one VTK snapshot. Empty vectors are skipped.
struct VtkFrame {
    Eigen::VectorXd u;          ///< CG2-vector coefficients; vertex nodes are exported
    Eigen::VectorXd c;          ///< EG1 coefficients [vertex | cell enrichment]
    Eigen::VectorXd p, phi, dphic_dt, mu, q_norm, r_mass;   ///< one value per cell
};

/// Legacy ASCII unstructured grid: u (padded to 3 components) and the CG part
/// of c as point data; the enrichment of c and the cellwise fields as cell data.
void write_vtk(const Mesh& mesh, const VtkFrame& frame, const std::filesystem::path& path);

/// Cell-data arrays of a legacy ASCII file written by write_vtk, keyed by name.
std::map<std::string, std::vector<double>> read_vtk_cell_data(const std::filesystem::path& path);

struct StepRecord {
    int step = 0;
    double t = 0.0, dt = 0.0;
    int fs_iterations = 0;
    double dphi_final = 0.0;
    double max_abs_r_mass = 0.0;
    double injected_volume = 0.0;
};

/// CSV time series, one row per completed step, flushed as it goes.
class TimeSeriesWriter {
public:
    explicit TimeSeriesWriter(const std::filesystem::path& path);
    void append(const StepRecord& r);

private:
    std::ofstream out_;
};

void write_timeseries(const std::vector<StepRecord>& records, const std::filesystem::path& path);

/// q_D t A_d.
inline double injected_volume(double q_d, double t, double area) { return q_d * t * area; }

} // namespace hmc
