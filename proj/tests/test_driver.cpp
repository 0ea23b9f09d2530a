#include <filesystem>

#include <gtest/gtest.h>

#include "hmc/driver.hpp"
#include "hmc/errors.hpp"
#include "hmc/log.hpp"

using namespace hmc;

namespace {

class DriverTest : public ::testing::Test {
protected:
    void SetUp() override { log_level() = LogLevel::quiet; }
};

SimulationConfig coarse(const std::string& preset = "example1a") {
    SimulationConfig c = preset_config(preset);
    c.mesh.nx = 10;
    c.mesh.ny = 3;
    c.output.vtk = c.output.csv = false;
    return c;
}

// closed box, no load, solute at equilibrium
SimulationConfig quiet_box() {
    SimulationConfig c = coarse();
    for (auto& w : c.bc) w = WallBC{};
    c.p0 = 1e6;
    c.c0.reset();
    return c;
}

double max_dev(const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return (a - b).cwiseAbs().maxCoeff(); }

} // namespace

TEST_F(DriverTest, ZeroLoadInitialState) {
    SimulationConfig c = quiet_box();
    c.p0 = 0.0;
    const Simulation sim(c);
    EXPECT_LT(sim.state().u.cwiseAbs().maxCoeff(), 1e-300);
    for (int t = 0; t < sim.mesh().num_cells(); ++t) EXPECT_DOUBLE_EQ(sim.state().phi(t), c.material.phi0);
}

TEST_F(DriverTest, TopLoadCompressesInitially) {
    const Simulation sim(coarse());
    EXPECT_LT(sim.state().eps_v0.maxCoeff(), 0.0);
    EXPECT_EQ(sim.state().step, 0);
    EXPECT_DOUBLE_EQ(sim.state().t, 0.0);
}

TEST_F(DriverTest, DecoupledMechanicsConvergesInOneIteration) {
    // With alpha = 0 the two porosity estimates still differ by
    // phi0 (p^{n-1} - p0)(p^n - p^{n-1}) / K^2; a water-like viscosity keeps that far below tol.
    SimulationConfig c = coarse();
    c.material.alpha = 0.0;
    c.material.viscosity = 1e-3;
    Simulation sim(c);
    for (int k = 0; k < 3; ++k) EXPECT_EQ(sim.advance().fixed_stress.iterations, 1);
}

TEST_F(DriverTest, CoupledStepsStayWithinIterationBudget) {
    Simulation sim(coarse());
    const StepInfo first = sim.advance();
    EXPECT_LE(first.fixed_stress.iterations, 4);
    EXPECT_EQ(first.fixed_stress.history.size(), static_cast<std::size_t>(first.fixed_stress.iterations));
    for (int k = 0; k < 5; ++k) EXPECT_LE(sim.advance().fixed_stress.iterations, 3);
    EXPECT_LT(sim.state().last_residual.max_abs, 1e-5);
    EXPECT_LT(sim.state().last_telescoping, 1e-10);
}

TEST_F(DriverTest, EquilibriumIsPreserved) {
    Simulation sim(quiet_box());
    const Eigen::VectorXd c0 = sim.state().c;
    for (int k = 0; k < 5; ++k) sim.advance();
    EXPECT_LT(max_dev(sim.state().c, c0), 1e-12);
    EXPECT_LT(sim.state().phi_c.cwiseAbs().maxCoeff(), 1e-15);
}

TEST_F(DriverTest, ZeroPhysicsKeepsEveryFieldConstant) {
    Simulation sim(quiet_box());
    const SimulationState s0 = sim.state();
    for (int k = 0; k < 10; ++k) sim.advance();
    const SimulationState& s = sim.state();
    EXPECT_EQ(s.step, 10);
    EXPECT_LT(max_dev(s.p, s0.p), 1e-9 * 1e6);
    EXPECT_LT(max_dev(s.u, s0.u), 1e-15);
    EXPECT_LT(max_dev(s.c, s0.c), 1e-12);
    EXPECT_LT(max_dev(s.phi, s0.phi), 1e-15);
    EXPECT_LT(max_dev(s.k_mult, s0.k_mult), 1e-14);
    EXPECT_LT(s.q.cwiseAbs().maxCoeff(), 1e-15);
}

TEST_F(DriverTest, UndersaturatedInflowDissolves) {
    Simulation sim(coarse());
    for (int k = 0; k < 4; ++k) sim.advance();
    const auto& s = sim.state();
    // cells touching the injection wall see fresh fluid first
    double near = 0.0;
    for (int t = 0; t < sim.mesh().num_cells(); ++t)
        if (sim.mesh().centroid(t).x() < 10.0) near = std::max(near, s.dphic_dt(t));
    EXPECT_GT(near, 0.0);
    EXPECT_GT(s.phi_c.maxCoeff(), 0.0);
}

TEST_F(DriverTest, ZeroSurfaceFreezesChemicalPorosity) {
    SimulationConfig c = coarse();
    c.material.A0 = 0.0;
    Simulation sim(c);
    for (int k = 0; k < 3; ++k) sim.advance();
    EXPECT_EQ(sim.state().phi_c.cwiseAbs().maxCoeff(), 0.0);
}

TEST_F(DriverTest, RestoreReplaysBitwise) {
    Simulation sim(coarse());
    for (int k = 0; k < 3; ++k) sim.advance();
    const SimulationState saved = sim.state();
    for (int k = 0; k < 2; ++k) sim.advance();
    const SimulationState ahead = sim.state();
    sim.restore(saved);
    for (int k = 0; k < 2; ++k) sim.advance();
    EXPECT_EQ(sim.state().step, ahead.step);
    EXPECT_EQ(sim.state().t, ahead.t);
    EXPECT_EQ(sim.state().c, ahead.c);
    EXPECT_EQ(sim.state().p, ahead.p);
    EXPECT_EQ(sim.state().u, ahead.u);
    EXPECT_EQ(sim.state().phi, ahead.phi);
}

TEST_F(DriverTest, FailuresCarryStepAndStage) {
    SimulationConfig c = coarse();
    c.solver.max_iterations = 1;
    c.solver.tol = 1e-30;
    Simulation sim(c);
    try {
        sim.advance();
        FAIL() << "expected nonconvergence";
    } catch (const NonconvergenceError& e) {
        // the iteration history survives the stage label
        EXPECT_NE(std::string(e.what()).find("step 1, stage fixed-stress"), std::string::npos);
        EXPECT_EQ(e.history().size(), 1u);
    }
    const StageError se(7, "chemistry", "boom");
    EXPECT_EQ(se.step(), 7);
    EXPECT_EQ(se.stage(), "chemistry");
    EXPECT_STREQ(se.what(), "step 7, stage chemistry: boom");
}

TEST_F(DriverTest, ChemistryBeforeFlowIsStateError) {
    Simulation sim(coarse());
    EXPECT_THROW(sim.chemistry_step(), StateError);
}

TEST_F(DriverTest, NonconvergenceKeepsHistory) {
    SimulationConfig c = coarse();
    c.solver.max_iterations = 2;
    c.solver.tol = 1e-30;
    Simulation sim(c);
    try {
        sim.fixed_stress_loop();
        FAIL() << "expected nonconvergence";
    } catch (const NonconvergenceError& e) {
        EXPECT_EQ(e.history().size(), 2u);
    }
}

TEST_F(DriverTest, SingularMechanicsIsConfigError) {
    SimulationConfig c = coarse();
    for (auto& w : c.bc) w.mechanics = MechanicsBC::free;
    EXPECT_THROW(Simulation{c}, ConfigError);
}

TEST_F(DriverTest, RunWritesFieldsAtCadence) {
    SimulationConfig c = coarse();
    c.output.vtk = c.output.csv = true;
    c.output.cadence = 2;
    const auto dir = std::filesystem::temp_directory_path() / "hmc_driver_run";
    std::filesystem::remove_all(dir);
    c.output.dir = dir.string();
    RunOptions opt;
    opt.max_steps = 5;
    const RunSummary s = run_simulation(c, opt);
    EXPECT_EQ(s.steps, 5);
    EXPECT_EQ(s.records.size(), 5u);
    for (int k : {0, 2, 4}) EXPECT_TRUE(std::filesystem::exists(dir / ("fields_0000" + std::to_string(k) + ".vtk")));
    for (int k : {1, 3, 5}) EXPECT_FALSE(std::filesystem::exists(dir / ("fields_0000" + std::to_string(k) + ".vtk")));
    EXPECT_TRUE(std::filesystem::exists(dir / "timeseries.csv"));
    EXPECT_NEAR(s.records.back().injected_volume, 2e-4 * s.t * 30.0, 1e-9);
}

TEST_F(DriverTest, PorosityGapContractsAfterFirstIteration) {
    SimulationConfig c = coarse();
    c.solver.tol = 1e-13;
    Simulation sim(c);
    for (int k = 0; k < 3; ++k) {
        const auto h = sim.advance().fixed_stress.history;
        for (std::size_t i = 2; i < h.size(); ++i) EXPECT_LT(h[i], h[i - 1]) << "step " << k + 1 << " iteration " << i + 1;
    }
}

TEST_F(DriverTest, LastStepLandsOnEndTime) {
    SimulationConfig c = coarse();
    c.time.t_end = 5000.0;
    RunOptions opt;
    opt.write_files = false;
    const RunSummary s = run_simulation(c, opt);
    EXPECT_EQ(s.t, 5000.0);
    EXPECT_EQ(s.records.back().t, 5000.0);
}
