#include <cmath>

#include <gtest/gtest.h>

#include "hmc/diagnostics.hpp"
#include "hmc/errors.hpp"
#include "hmc/studies.hpp"

using namespace hmc;

TEST(DofReportTest, TwoTriangleSquare) {
    const DofReport r = dof_report(build_rectangle_mesh(1, 1, 1, 1));
    EXPECT_EQ(r.cg2_vector, 18);
    EXPECT_EQ(r.bdm1, 10);
    EXPECT_EQ(r.dg0, 2);
    EXPECT_EQ(r.eg1, 6);
    EXPECT_EQ(r.euler, 1);
    EXPECT_TRUE(r.identities_hold);
    EXPECT_NE(format_dof_report(r).find("18"), std::string::npos);
}

TEST(DofReportTest, ReferenceQuadrupleIsConsistent) {
    EXPECT_TRUE(dof_identities(4058, 11909, 7852, 31934, 23818, 7852, 11910));
    EXPECT_FALSE(dof_identities(4058, 11909, 7852, 31934, 23818, 7852, 11909));
    EXPECT_FALSE(dof_identities(4058, 11909, 7852, 31936, 23818, 7852, 11910));
}

TEST(DofReportTest, EmptyMeshRejected) {
    EXPECT_THROW(dof_report(Mesh()), InvalidArgument);
}

TEST(MassResidual, SteadyUniformFlowIsRoundOff) {
    const MassResidualField f = steady_flow_residual(10, 4);
    // scale: q_D |e| is about 1e-3 m^3/s per facet
    EXPECT_LT(f.max_abs, 1e-12);
    EXPECT_LT(telescoping_defect(f), 1e-12);
    // 6e-3 m^3/s enter on the left and leave on the right
    EXPECT_NEAR(f.boundary_total, 0.0, 1e-10 * 6e-3);
}

TEST(MassResidual, StorageBalancesInjection) {
    // one cell pair storing exactly what is injected through the left wall
    const Mesh m = build_rectangle_mesh(1, 1, 1, 1);
    const BoundaryTags tags = tag_boundaries(m, 1, 1);
    WallBCs bcs;
    bcs[static_cast<int>(Wall::left)].flux = 1e-3;
    const FlowProblem fp(m, tags, bcs);
    FlowInputs fin;
    fin.permeability.assign(2, Mat2::Identity());
    fin.viscosity = Eigen::VectorXd::Ones(2);
    fin.storage = Eigen::VectorXd::Constant(2, 1e-2);
    fin.p_prev = Eigen::VectorXd::Zero(2);
    fin.rate_source = Eigen::VectorXd::Zero(2);
    fin.g = Eigen::VectorXd::Zero(2);
    fin.dt = 10.0;
    const FlowSolution sol = fp.solve(fin);
    MassBalanceInputs in;
    in.storage = fin.storage;
    in.p = sol.p;
    in.p_prev = fin.p_prev;
    in.sigma = in.sigma_prev = in.phi_c = in.phi_c_prev = in.g = Eigen::VectorXd::Zero(2);
    in.q = sol.q;
    in.alpha = 0.74;
    in.K = 8.4e9;
    in.dt = fin.dt;
    const MassResidualField r = local_mass_residual(m, tags, bcs, in);
    EXPECT_LT(r.max_abs, 1e-15);
    EXPECT_NEAR(r.volume_total, 1e-3, 1e-15);
    EXPECT_NEAR(r.boundary_total, -1e-3, 1e-15);
    EXPECT_LT(telescoping_defect(r), 1e-12);
}

TEST(MassResidual, MissingPreviousStepIsStateError) {
    const Mesh m = build_rectangle_mesh(1, 1, 1, 1);
    const BoundaryTags tags = tag_boundaries(m, 1, 1);
    MassBalanceInputs in;
    in.dt = 0.0;
    EXPECT_THROW(local_mass_residual(m, tags, WallBCs{}, in), StateError);
}

TEST(FieldStatsTest, MinMaxMean) {
    const FieldStats s = field_stats(Eigen::Vector3d(1, -2, 4));
    EXPECT_EQ(s.min, -2);
    EXPECT_EQ(s.max, 4);
    EXPECT_DOUBLE_EQ(s.mean, 1.0);
}

TEST(Studies, TerzaghiSeriesMatchesImageSolution) {
    // short-time form: alternating images of the drained boundary
    auto images = [](double z, double Tv) {
        const double s = 2.0 * std::sqrt(Tv);
        double p = 1.0;
        for (int n = 0; n < 20; ++n)
            p -= (n % 2 ? -1.0 : 1.0) * (std::erfc((2 * n + z) / s) + std::erfc((2 * n + 2 - z) / s));
        return p;
    };
    for (double Tv : {0.1, 0.3, 0.6})
        for (double z : {0.0, 0.25, 0.5, 1.0}) EXPECT_NEAR(terzaghi_pressure(1.0, z, 1.0, Tv), images(z, Tv), 1e-12);
    EXPECT_NEAR(terzaghi_pressure(2.0, 0.0, 1.0, 0.2), 0.0, 1e-15);
    EXPECT_NEAR(terzaghi_pressure(2.0, 3.0, 3.0, 0.3), 2.0 * images(1.0, 0.3), 1e-12);
}

TEST(Studies, FrontVarianceOfFlatFrontIsZero) {
    const Mesh m = build_rectangle_mesh(4, 2, 8, 4);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(m.num_vertices() + m.num_cells());
    for (int v = 0; v < m.num_vertices(); ++v) c(v) = m.vertex(v).x() < 1.5 ? 1.0 : 0.0;
    EXPECT_NEAR(front_y_variance(m, c, 0.0, 1.0, 2.0, 4), 0.0, 1e-15);
    for (int v = 0; v < m.num_vertices(); ++v) c(v) = m.vertex(v).x() < (m.vertex(v).y() > 1.0 ? 3.0 : 1.0) ? 1.0 : 0.0;
    EXPECT_GT(front_y_variance(m, c, 0.0, 1.0, 2.0, 4), 0.1);
}
