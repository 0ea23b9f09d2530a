#include <cmath>

#include <gtest/gtest.h>

#include "hmc/assembly.hpp"
#include "hmc/constitutive.hpp"
#include "hmc/errors.hpp"
#include "hmc/poroelastic.hpp"

using namespace hmc;

TEST(FacetCoefficientsTest, EqualTensors) {
    const auto fc = facet_coefficients(Mat2::Identity(), Mat2::Identity(), Vec2(1, 0));
    EXPECT_DOUBLE_EQ(fc.delta, 0.5);
    EXPECT_DOUBLE_EQ(fc.k_e, 1.0);
}

TEST(FacetCoefficientsTest, ContrastWeightsTowardSofterSide) {
    const auto fc = facet_coefficients(3.0 * Mat2::Identity(), Mat2::Identity(), Vec2(0, 1));
    EXPECT_DOUBLE_EQ(fc.delta, 0.25);
    EXPECT_DOUBLE_EQ(fc.k_e, 1.5);
}

TEST(FacetCoefficientsTest, AnisotropicNormalProjection) {
    Mat2 k = Mat2::Zero();
    k(0, 0) = 1.0;
    k(1, 1) = 0.1;
    const auto fc = facet_coefficients(k, k, Vec2(0, 1));
    EXPECT_DOUBLE_EQ(fc.k_plus, 0.1);
    EXPECT_DOUBLE_EQ(fc.k_minus, 0.1);
    EXPECT_DOUBLE_EQ(fc.delta, 0.5);
}

TEST(FacetCoefficientsTest, NonSpdRejected) {
    Mat2 bad;
    bad << 1, 2, 2, 1;
    EXPECT_THROW(facet_coefficients(bad, Mat2::Identity(), Vec2(1, 0)), InvalidArgument);
}

TEST(AverageAndJump, ContinuousValue) {
    EXPECT_DOUBLE_EQ(weighted_average(2.0, 2.0, 0.3), 2.0);
    EXPECT_EQ(jump(2.0, 2.0, Vec2(1, 0)), Vec2(0, 0));
    EXPECT_DOUBLE_EQ(weighted_average(5.0, 1.0, 1.0), 5.0);
}

TEST(AverageAndJump, ScalarJumpAlongNormal) {
    EXPECT_EQ(jump(2.0, 1.0, Vec2(1, 0)), Vec2(1, 0));
    EXPECT_DOUBLE_EQ(jump(Vec2(1, 2), Vec2(1, 0), Vec2(0, 1)), 2.0);
}

TEST(AssembleOperator, Dg0MassOnTwoTriangles) {
    const Mesh m = build_rectangle_mesh(1, 1, 1, 1);
    const DofMap d = build_dofmap(m, SpaceKind::dg0);
    const auto sys = assemble_operator(m, d, d, [&](int t, Eigen::MatrixXd& a, Eigen::VectorXd&) {
        a(0, 0) = m.cell_area(t);
    });
    const Eigen::MatrixXd dense(sys.matrix);
    EXPECT_TRUE(dense.isApprox((Eigen::Matrix2d() << 0.5, 0, 0, 0.5).finished()));
}

TEST(AssembleOperator, Cg1StiffnessAnnihilatesConstants) {
    const Mesh m = build_rectangle_mesh(2, 1, 3, 2, DiagonalPattern::crossed);
    const DofMap d = build_dofmap(m, SpaceKind::cg1);
    const auto sys = assemble_operator(m, d, d, [&](int t, Eigen::MatrixXd& a, Eigen::VectorXd&) {
        const auto g = hat_gradients(CellMap(m, t));
        a = m.cell_area(t) * g * g.transpose();
    });
    EXPECT_LT((sys.matrix * Eigen::VectorXd::Ones(d.size())).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(AssembleOperator, OutOfRangeDofRejected) {
    const Mesh m = build_rectangle_mesh(1, 1, 1, 1);
    const DofMap d = build_dofmap(m, SpaceKind::dg0);
    const DofMap small(SpaceKind::dg0, 1, 1, {0, 1}, {{EntityKind::cell, 0}});
    EXPECT_THROW(assemble_operator(m, d, small, [](int, Eigen::MatrixXd& a, Eigen::VectorXd&) { a(0, 0) = 1; }),
                 std::out_of_range);
}

TEST(ElasticPatch, LinearDisplacementBalancedByBoundaryTraction) {
    const double L = 2.0, H = 1.0;
    const Mesh m = build_rectangle_mesh(L, H, 4, 3, DiagonalPattern::crossed);
    const BoundaryTags tags = tag_boundaries(m, L, H);
    WallBCs bcs;
    const auto [lambda, shear] = lame_constants(8.4e9, 0.18);
    const MomentumProblem mp(m, tags, bcs, lambda, shear);
    const int nv = m.num_vertices();
    Eigen::VectorXd u = Eigen::VectorXd::Zero(mp.dofmap().size());
    for (int v = 0; v < nv; ++v) u(2 * v) = m.vertex(v).x();
    for (int f = 0; f < m.num_facets(); ++f) u(2 * (nv + f)) = m.facet_midpoint(f).x();
    const Eigen::VectorXd force = mp.stiffness() * u;
    // sigma = [[lambda + 2 mu, 0], [0, lambda]]: interior rows vanish, wall resultants match
    auto on_boundary = [&](int node) {
        const Point x = node < nv ? m.vertex(node) : m.facet_midpoint(node - nv);
        return x.x() == 0 || x.x() == L || x.y() == 0 || x.y() == H;
    };
    double fx_right = 0, fy_top = 0, scale = (lambda + 2 * shear) * H;
    for (int node = 0; node < nv + m.num_facets(); ++node) {
        const Point x = node < nv ? m.vertex(node) : m.facet_midpoint(node - nv);
        if (!on_boundary(node)) {
            EXPECT_NEAR(force(2 * node), 0.0, 1e-9 * scale);
            EXPECT_NEAR(force(2 * node + 1), 0.0, 1e-9 * scale);
        }
        if (x.x() == L) fx_right += force(2 * node);
        if (x.y() == H) fy_top += force(2 * node + 1);
    }
    EXPECT_NEAR(fx_right, (lambda + 2 * shear) * H, 1e-9 * scale);
    EXPECT_NEAR(fy_top, lambda * L, 1e-9 * scale);
}

TEST(ConstraintsTest, ConflictingValuesRejected) {
    Constraints c;
    c.add(3, 1.0);
    EXPECT_NO_THROW(c.add(3, 1.0));
    EXPECT_THROW(c.add(3, 2.0), ConflictError);
}

TEST(ConstraintsTest, FullyConstrainedSystemReturnsValues) {
    const Mesh m = build_rectangle_mesh(1, 1, 2, 2);
    const DofMap d = build_dofmap(m, SpaceKind::cg1);
    auto sys = assemble_operator(m, d, d, [&](int t, Eigen::MatrixXd& a, Eigen::VectorXd& b) {
        const auto g = hat_gradients(CellMap(m, t));
        a = m.cell_area(t) * g * g.transpose();
        b.setConstant(1.0);
    });
    Constraints c;
    for (int i = 0; i < d.size(); ++i) c.add(i, 0.5 * i - 1.0);
    apply_strong_bcs(sys.matrix, sys.rhs, c);
    const Eigen::VectorXd x = solve_linear(sys.matrix, sys.rhs);
    for (int i = 0; i < d.size(); ++i) EXPECT_NEAR(x(i), 0.5 * i - 1.0, 1e-14);
}

TEST(ConstraintsTest, EliminationKeepsSymmetry) {
    const Mesh m = build_rectangle_mesh(1, 1, 3, 3);
    const DofMap d = build_dofmap(m, SpaceKind::cg1);
    auto sys = assemble_operator(m, d, d, [&](int t, Eigen::MatrixXd& a, Eigen::VectorXd&) {
        const auto g = hat_gradients(CellMap(m, t));
        a = m.cell_area(t) * g * g.transpose();
    });
    Constraints c;
    for (int v = 0; v < m.num_vertices(); ++v) {
        if (m.vertex(v).x() == 0.0) c.add(v, 1.0);
        if (m.vertex(v).x() == 1.0) c.add(v, 0.0);
    }
    apply_strong_bcs(sys.matrix, sys.rhs, c);
    const Eigen::MatrixXd a(sys.matrix);
    EXPECT_LT((a - a.transpose()).cwiseAbs().maxCoeff(), 1e-15);
    // Laplace with linear data: the interpolant of 1 - x is exact
    const Eigen::VectorXd x = solve_linear(sys.matrix, sys.rhs);
    for (int v = 0; v < m.num_vertices(); ++v) EXPECT_NEAR(x(v), 1.0 - m.vertex(v).x(), 1e-13);
}

TEST(LinearSolverTest, IdentityAndSmallSpd) {
    SparseMatrix id(3, 3);
    id.setIdentity();
    const Eigen::Vector3d b(1, -2, 3);
    EXPECT_EQ(solve_linear(id, b), Eigen::VectorXd(b));
    SparseMatrix a(2, 2);
    a.insert(0, 0) = 2;
    a.insert(0, 1) = 1;
    a.insert(1, 0) = 1;
    a.insert(1, 1) = 2;
    SolveReport rep;
    const Eigen::VectorXd x = solve_linear(a, Eigen::Vector2d(3, 3), &rep);
    EXPECT_NEAR(x(0), 1.0, 1e-15);
    EXPECT_NEAR(x(1), 1.0, 1e-15);
    EXPECT_LT(rep.relative_residual, 1e-15);
}

TEST(LinearSolverTest, SingularMatrixNamesZeroPivot) {
    SparseMatrix a(2, 2);
    a.insert(0, 0) = 1;
    a.insert(1, 0) = 1;
    try {
        solve_linear(a, Eigen::Vector2d(1, 1));
        FAIL() << "expected a solver error";
    } catch (const SolverError& e) {
        EXPECT_NE(std::string(e.what()).find("pivot"), std::string::npos);
    }
}

TEST(LinearSolverTest, FactorizeOnceSolveMany) {
    SparseMatrix a(2, 2);
    a.insert(0, 0) = 4;
    a.insert(1, 1) = 0.5;
    LinearSolver s;
    EXPECT_FALSE(s.factorized());
    EXPECT_THROW(s.solve(Eigen::Vector2d(1, 1)), StateError);
    s.factorize(a);
    EXPECT_NEAR(s.solve(Eigen::Vector2d(4, 1))(1), 2.0, 1e-15);
    EXPECT_NEAR(s.solve(Eigen::Vector2d(8, 0))(0), 2.0, 1e-15);
}
