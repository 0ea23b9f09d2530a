#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hmc/config.hpp"
#include "hmc/diagnostics.hpp"
#include "hmc/mesh.hpp"
#include "hmc/output.hpp"
#include "hmc/poroelastic.hpp"
#include "hmc/timestepping.hpp"
#include "hmc/transport.hpp"

namespace hmc {

struct FixedStressReport {
    int iterations = 0;
    double dphi_final = 0.0;
    std::vector<double> history;   ///< dphi after every iteration
};

/// Everything needed to continue a run. Copying it and restoring it later
/// reproduces the following steps exactly.
struct SimulationState {
    int step = 0;                 ///< index of the last completed step
    double t = 0.0;
    double dt = 0.0;              ///< length of the next step
    double dt_prev = 0.0;         ///< length of the last completed step

    Eigen::VectorXd u, q, p;
    Eigen::VectorXd c;            ///< EG1 concentration at the last completed step
    Eigen::VectorXd c_prev;       ///< one step earlier (for extrapolation)
    Eigen::VectorXd c_hat;        ///< extrapolated concentration for the next step
    HistoryRing<Eigen::VectorXd> c_history{4};   ///< newest first, c^n at [0]

    Eigen::VectorXd eps_v0;       ///< initial volumetric strain
    Eigen::VectorXd eps_v, sigma; ///< cellwise, last completed step
    Eigen::VectorXd phi, phi_m, phi_f, phi_c;
    Eigen::VectorXd phi_c_hat;    ///< predicted chemical porosity for the next step
    Eigen::VectorXd dphic_dt;
    Eigen::VectorXd A_s, k_mult, mu;
    std::vector<Mat2> D_e;

    FixedStressReport last_fixed_stress;
    MassResidualField last_residual;
    double last_telescoping = 0.0;
};

/// One completed step as seen by callers.
struct StepInfo {
    StepRecord record;
    FixedStressReport fixed_stress;
    double telescoping = 0.0;
};

/// Coupled hydro-mechanical-chemical time stepper on one mesh.
class Simulation {
public:
    explicit Simulation(const SimulationConfig& config);
    ~Simulation();
    Simulation(const Simulation&) = delete;
    Simulation& operator=(const Simulation&) = delete;

    const SimulationConfig& config() const { return config_; }
    const Mesh& mesh() const { return mesh_; }
    const BoundaryTags& tags() const { return tags_; }
    const SimulationState& state() const { return state_; }
    void restore(const SimulationState& s) { state_ = s; }

    /// Base permeability tensor of every cell (layers, random field or uniform).
    const std::vector<Mat2>& base_permeability() const { return k_base_; }

    /// Flow and mechanics iterated to the porosity tolerance for the next step,
    /// then the step's mass residual. Leaves the step uncommitted until chemistry_step.
    FixedStressReport fixed_stress_loop();
    /// Transport, extrapolation, next step size and property prediction; commits the step.
    void chemistry_step();
    /// Both parts with stage-labeled errors.
    StepInfo advance();

    /// q_D |e| summed over injecting flux facets.
    double injection_rate() const;
    bool finished() const;
    VtkFrame frame() const;

private:
    void initialize();
    void update_properties_for_flow();
    std::vector<Mat2> permeability() const;
    Eigen::VectorXd viscosity_from(const Eigen::VectorXd& c_eg) const;
    Eigen::VectorXd cell_average(const Eigen::VectorXd& c_eg) const;

    SimulationConfig config_;
    Mesh mesh_;
    BoundaryTags tags_;
    std::unique_ptr<MomentumProblem> momentum_;
    std::unique_ptr<FlowProblem> flow_;
    std::unique_ptr<TransportProblem> transport_;
    std::vector<Mat2> k_base_;
    Eigen::VectorXd storage_;
    double lambda_ = 0.0, shear_ = 0.0;
    SimulationState state_;

    // snapshots of the pending step used by the mass residual
    Eigen::VectorXd pending_p_prev_, pending_sigma_used_, pending_sigma_prev_, pending_phi_c_prev_;
    double pending_dt_ = 0.0;
    bool pending_ = false;
};

struct RunSummary {
    int steps = 0;
    double t = 0.0;
    int first_step_iterations = 0;
    int max_later_iterations = 0;
    double max_r_mass = 0.0;
    double max_telescoping = 0.0;
    std::vector<StepRecord> records;
};

struct RunOptions {
    std::optional<int> max_steps;
    bool write_files = true;
    std::function<void(const Simulation&, const StepInfo&)> on_step;
};

Mesh build_mesh(const MeshConfig& cfg);

/// Time loop to t_end or the step cap; VTK at the output cadence and one CSV row per step.
RunSummary run_simulation(const SimulationConfig& config, const RunOptions& options = {});

} // namespace hmc
