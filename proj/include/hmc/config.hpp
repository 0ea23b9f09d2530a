#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hmc/constitutive.hpp"
#include "hmc/mesh.hpp"
#include "hmc/poroelastic.hpp"
#include "hmc/randfield.hpp"

namespace hmc {

struct MeshConfig {
    double length = 100.0;
    double height = 30.0;
    int nx = 40;
    int ny = 12;
    DiagonalPattern pattern = DiagonalPattern::crossed;
    std::string file;   ///< triangle-list file; overrides the generated box when set
};

struct TimeConfig {
    double dt0 = 2000.0;
    double dt_max = 2000.0;
    double cfl = 0.1;
    double t_end = 60000.0;
    int max_steps = 100000;
};

struct SolverConfig {
    double tol = 1e-6;
    int max_iterations = 50;
    double beta = 1.1;
    double theta = -1.0;
    double gamma = 0.25;
    int bdf_order = 4;
};

struct OutputConfig {
    std::string dir = "output";
    int cadence = 10;    ///< VTK every N steps; 0 disables field output
    bool vtk = true;
    bool csv = true;
};

struct RandomFieldConfig {
    bool enabled = false;
    RandomFieldSpec spec;
    std::string file;   ///< pinned realization (cellwise CSV) instead of sampling
};

/// Horizontal band [ymin, ymax] with its own base permeability.
struct LayerConfig {
    double ymin = 0.0, ymax = 0.0;
    Mat2 k = Mat2::Identity();
};

struct SimulationConfig {
    std::string preset;
    MeshConfig mesh;
    MaterialParams material;
    WallBCs bc;
    double p0 = 1e6;
    std::optional<double> c0;   ///< defaults to the equilibrium value at p0
    TimeConfig time;
    SolverConfig solver;
    OutputConfig output;
    RandomFieldConfig randfield;
    std::vector<LayerConfig> layers;
    bool transport = true;

    /// Range and consistency checks; throws ConfigError naming the key.
    void validate() const;
};

bool operator==(const SimulationConfig& a, const SimulationConfig& b);

/// Known preset names: example1a, example1b, example2, example3, example4, terzaghi.
std::vector<std::string> preset_names();
SimulationConfig preset_config(const std::string& name);

SimulationConfig parse_config_string(const std::string& text);
SimulationConfig parse_config(const std::filesystem::path& path);
/// Fully explicit text form; parse_config_string(serialize_config(c)) == c.
std::string serialize_config(const SimulationConfig& cfg);

/// Undrained pore pressure of a laterally confined column under vertical load `load` (Pa, compressive positive).
double undrained_pressure(const MaterialParams& m, double load);

} // namespace hmc
