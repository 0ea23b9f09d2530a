#include "hmc/poroelastic.hpp"

#include <cmath>

#include <Eigen/LU>

#include "hmc/errors.hpp"
#include "hmc/quadrature.hpp"

namespace hmc {

const char* to_string(MechanicsBC b) {
    switch (b) {
    case MechanicsBC::roller: return "roller";
    case MechanicsBC::traction: return "traction";
    case MechanicsBC::fixed: return "fixed";
    case MechanicsBC::free: return "free";
    }
    return "?";
}

const char* to_string(FlowBC b) { return b == FlowBC::flux ? "flux" : "pressure"; }

namespace {

// Voigt strain-displacement rows (exx, eyy, gxy) for the 12 CG2-vector basis functions.
Eigen::Matrix<double, 3, 12> strain_matrix(const Eigen::Matrix<double, 6, 2>& g) {
    Eigen::Matrix<double, 3, 12> b = Eigen::Matrix<double, 3, 12>::Zero();
    for (int n = 0; n < 6; ++n) {
        b(0, 2 * n) = g(n, 0);
        b(1, 2 * n + 1) = g(n, 1);
        b(2, 2 * n) = g(n, 1);
        b(2, 2 * n + 1) = g(n, 0);
    }
    return b;
}

// Nodes of boundary facet f in CG2 numbering: two vertices and the edge node.
std::array<int, 3> facet_nodes(const Mesh& mesh, int f) {
    return {mesh.facet(f)[0], mesh.facet(f)[1], mesh.num_vertices() + f};
}

double outward_sign(const Mesh& mesh, int f) {
    const int t = mesh.facet_cells(f)[0];
    return mesh.facet_sign(t, mesh.local_facet_index(t, f));
}

} // namespace

MomentumProblem::MomentumProblem(const Mesh& mesh, const BoundaryTags& tags, const WallBCs& bcs, double lambda,
                                 double shear)
    : mesh_(&mesh), dofs_(build_dofmap(mesh, SpaceKind::cg2_vector)), lambda_(lambda), shear_(shear) {
    Eigen::Matrix3d d;
    d << lambda + 2 * shear, lambda, 0, lambda, lambda + 2 * shear, 0, 0, 0, shear;
    const TriangleRule& rule = triangle_rule(2);
    auto kernel = [&](int t, Eigen::MatrixXd& a, Eigen::VectorXd&) {
        CellMap map(mesh, t);
        Eigen::Matrix<double, 6, 1> v;
        Eigen::Matrix<double, 6, 2> g;
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            p2_basis(map, rule.points[q], v, g);
            const auto b = strain_matrix(g);
            a += rule.weights[q] * std::abs(map.det) * b.transpose() * d * b;
        }
    };
    stiffness_ = assemble_operator(mesh, dofs_, dofs_, kernel).matrix;

    traction_load_ = Eigen::VectorXd::Zero(dofs_.size());
    bool fixed_x = false, fixed_y = false;
    for (Wall w : all_walls) {
        const WallBC& bc = bcs[static_cast<int>(w)];
        for (int f : tags.facets_on(w)) {
            const auto nodes = facet_nodes(mesh, f);
            switch (bc.mechanics) {
            case MechanicsBC::roller: {
                const int comp = (w == Wall::left || w == Wall::right) ? 0 : 1;
                for (int n : nodes) constraints_.add(2 * n + comp, 0.0);
                (comp == 0 ? fixed_x : fixed_y) = true;
                break;
            }
            case MechanicsBC::fixed:
                for (int n : nodes) {
                    constraints_.add(2 * n, 0.0);
                    constraints_.add(2 * n + 1, 0.0);
                }
                fixed_x = fixed_y = true;
                break;
            case MechanicsBC::traction: {
                const double len = mesh.facet_length(f);
                const double w3[3] = {len / 6.0, len / 6.0, 2.0 * len / 3.0};
                for (int i = 0; i < 3; ++i) {
                    traction_load_(2 * nodes[i]) += w3[i] * bc.traction.x();
                    traction_load_(2 * nodes[i] + 1) += w3[i] * bc.traction.y();
                }
                break;
            }
            case MechanicsBC::free: break;
            }
        }
    }
    if (!fixed_x || !fixed_y) throw SolverError("singular momentum system: rigid body translation is unconstrained");

    constrained_ = stiffness_;
    Eigen::VectorXd dummy = Eigen::VectorXd::Zero(dofs_.size());
    apply_strong_bcs(constrained_, dummy, constraints_);
    solver_.factorize(constrained_);
}

Eigen::VectorXd MomentumProblem::solve(const Eigen::VectorXd& p_cell, double alpha, const Vec2& body_force) const {
    const Mesh& mesh = *mesh_;
    if (p_cell.size() != mesh.num_cells()) throw InvalidArgument("momentum: pressure has wrong length");
    Eigen::VectorXd rhs = traction_load_;
    const TriangleRule& rule = triangle_rule(2);
    Eigen::Matrix<double, 6, 1> v;
    Eigen::Matrix<double, 6, 2> g;
    for (int t = 0; t < mesh.num_cells(); ++t) {
        CellMap map(mesh, t);
        const auto dofs = dofs_.cell_dofs(t);
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            p2_basis(map, rule.points[q], v, g);
            const double w = rule.weights[q] * std::abs(map.det);
            for (int n = 0; n < 6; ++n) {
                rhs(dofs[2 * n]) += w * (alpha * p_cell(t) * g(n, 0) + body_force.x() * v(n));
                rhs(dofs[2 * n + 1]) += w * (alpha * p_cell(t) * g(n, 1) + body_force.y() * v(n));
            }
        }
    }
    // lift the prescribed values through the unconstrained stiffness, then pin them
    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(dofs_.size());
    for (const auto& [dof, val] : constraints_.values()) x0(dof) = val;
    rhs -= stiffness_ * x0;
    for (const auto& [dof, val] : constraints_.values()) rhs(dof) = constrained_.coeff(dof, dof) * val;
    return solver_.solve(rhs, &report_);
}

Eigen::VectorXd MomentumProblem::volumetric_strain(const Eigen::VectorXd& u) const {
    const Mesh& mesh = *mesh_;
    Eigen::VectorXd eps(mesh.num_cells());
    const TriangleRule& rule = triangle_rule(1);
    Eigen::Matrix<double, 6, 1> v;
    Eigen::Matrix<double, 6, 2> g;
    for (int t = 0; t < mesh.num_cells(); ++t) {
        CellMap map(mesh, t);
        const auto dofs = dofs_.cell_dofs(t);
        // div u is linear, so its mean is the centroid value
        p2_basis(map, rule.points[0], v, g);
        double s = 0.0;
        for (int n = 0; n < 6; ++n) s += u(dofs[2 * n]) * g(n, 0) + u(dofs[2 * n + 1]) * g(n, 1);
        eps(t) = s;
    }
    return eps;
}

std::vector<Eigen::Vector4d> MomentumProblem::effective_stress(const Eigen::VectorXd& u) const {
    const Mesh& mesh = *mesh_;
    std::vector<Eigen::Vector4d> out(mesh.num_cells());
    const TriangleRule& rule = triangle_rule(1);
    Eigen::Matrix<double, 6, 1> v;
    Eigen::Matrix<double, 6, 2> g;
    for (int t = 0; t < mesh.num_cells(); ++t) {
        CellMap map(mesh, t);
        const auto dofs = dofs_.cell_dofs(t);
        p2_basis(map, rule.points[0], v, g);
        Eigen::Matrix<double, 12, 1> ue;
        for (int k = 0; k < 12; ++k) ue(k) = u(dofs[k]);
        const Eigen::Vector3d e = strain_matrix(g) * ue;
        const double tr = e(0) + e(1);
        out[t] = {lambda_ * tr + 2 * shear_ * e(0), lambda_ * tr + 2 * shear_ * e(1), shear_ * e(2), lambda_ * tr};
    }
    return out;
}

Eigen::VectorXd volumetric_stress(const Eigen::VectorXd& eps_v, const Eigen::VectorXd& p, double K, double alpha) {
    return K * eps_v - alpha * p;
}

Eigen::VectorXd fixed_stress_source(const Eigen::VectorXd& sigma_iter, const Eigen::VectorXd& sigma_prev, double dt,
                                    double alpha, double K) {
    if (!(dt > 0)) throw InvalidArgument("fixed_stress_source: dt must be positive");
    return (alpha / K) * (sigma_iter - sigma_prev) / dt;
}

FlowProblem::FlowProblem(const Mesh& mesh, const BoundaryTags& tags, const WallBCs& bcs)
    : mesh_(&mesh), tags_(&tags), bcs_(bcs), space_(mesh) {
    for (Wall w : all_walls) {
        const WallBC& bc = bcs[static_cast<int>(w)];
        if (bc.flow != FlowBC::flux) continue;
        for (int f : tags.facets_on(w)) {
            constraints_.add(2 * f, -bc.flux * outward_sign(mesh, f) * mesh.facet_length(f));
            constraints_.add(2 * f + 1, 0.0);
        }
    }
}

AssembledSystem FlowProblem::assemble(const FlowInputs& in) const {
    const Mesh& mesh = *mesh_;
    const int nq = space_.dofmap().size(), nt = mesh.num_cells();
    if (static_cast<int>(in.permeability.size()) != nt || in.viscosity.size() != nt || in.storage.size() != nt ||
        in.p_prev.size() != nt || in.rate_source.size() != nt || in.g.size() != nt)
        throw InvalidArgument("flow block: coefficient arrays must have one entry per cell");
    if (!(in.dt > 0)) throw InvalidArgument("flow block: dt must be positive");

    Triplets trips;
    trips.reserve(static_cast<std::size_t>(nt) * 48);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nq + nt);
    const TriangleRule& rule = triangle_rule(2);
    const TriangleRule& src_rule = triangle_rule(4);

    for (int t = 0; t < nt; ++t) {
        const Mat2& k = in.permeability[t];
        if (!(k.determinant() > 0)) throw StateError("permeability is singular on cell " + std::to_string(t));
        const Mat2 resist = in.viscosity(t) * k.inverse();
        CellMap map(mesh, t);
        const Bdm1Cell& cell = space_.cell(t);
        const double area = mesh.cell_area(t);
        Eigen::Matrix<double, 6, 6> a = Eigen::Matrix<double, 6, 6>::Zero();
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const auto psi = cell.values(map.to_physical(rule.points[q]));
            a += rule.weights[q] * std::abs(map.det) * psi * resist * psi.transpose();
        }
        const auto& cf = mesh.cell_facets(t);
        int dofs[6];
        for (int i = 0; i < 3; ++i) {
            dofs[2 * i] = 2 * cf[i];
            dofs[2 * i + 1] = 2 * cf[i] + 1;
        }
        const int pd = nq + t;
        for (int i = 0; i < 6; ++i) {
            for (int j = 0; j < 6; ++j) trips.emplace_back(dofs[i], dofs[j], a(i, j));
            const double bij = cell.divergence()(i) * area;
            trips.emplace_back(dofs[i], pd, -bij);
            trips.emplace_back(pd, dofs[i], -bij);
        }
        const double c = in.storage(t) * area / in.dt;
        trips.emplace_back(pd, pd, -c);
        double gint = in.g(t) * area;
        if (in.g_field) {
            for (std::size_t q = 0; q < src_rule.points.size(); ++q)
                gint += src_rule.weights[q] * std::abs(map.det) * in.g_field(map.to_physical(src_rule.points[q]));
        }
        rhs(pd) = -(c * in.p_prev(t) - area * in.rate_source(t) + gint);
    }

    const EdgeRule& erule = edge_rule(7);
    for (Wall w : all_walls) {
        const WallBC& bc = bcs_[static_cast<int>(w)];
        if (bc.flow != FlowBC::pressure) continue;
        for (int f : tags_->facets_on(w)) {
            const double s = outward_sign(mesh, f);
            if (in.p_boundary) {
                const Point& lo = mesh.vertex(mesh.facet(f)[0]);
                const Point& hi = mesh.vertex(mesh.facet(f)[1]);
                double m0 = 0.0, m1 = 0.0;
                for (std::size_t q = 0; q < erule.points.size(); ++q) {
                    const double sq = erule.points[q];
                    const double pd = in.p_boundary(lo + sq * (hi - lo));
                    m0 += erule.weights[q] * pd;
                    m1 += erule.weights[q] * 3.0 * (2.0 * sq - 1.0) * pd;
                }
                rhs(2 * f) -= s * m0;
                rhs(2 * f + 1) -= s * m1;
            } else {
                // the 0th-moment basis has normal trace 1/|e| on its facet
                rhs(2 * f) -= s * bc.pressure;
            }
        }
    }

    AssembledSystem sys;
    sys.matrix.resize(nq + nt, nq + nt);
    sys.matrix.setFromTriplets(trips.begin(), trips.end());
    sys.rhs = std::move(rhs);
    return sys;
}

FlowSolution FlowProblem::solve(const FlowInputs& in) const {
    AssembledSystem sys = assemble(in);
    apply_strong_bcs(sys.matrix, sys.rhs, constraints_);
    FlowSolution sol;
    const Eigen::VectorXd x = solve_linear(sys.matrix, sys.rhs, &sol.report);
    const int nq = space_.dofmap().size();
    sol.q = x.head(nq);
    sol.p = x.tail(mesh_->num_cells());
    return sol;
}

double FlowProblem::boundary_outflow(const Eigen::VectorXd& q, int f) const {
    return q(2 * f) * outward_sign(*mesh_, f);
}

double max_velocity_norm(const Mesh& mesh, const Bdm1Space& space, const Eigen::VectorXd& q) {
    const TriangleRule& rule = triangle_rule(cell_quadrature_degree);
    double m = 0.0;
    for (int t = 0; t < mesh.num_cells(); ++t) {
        CellMap map(mesh, t);
        for (const auto& xi : rule.points) m = std::max(m, space.evaluate(q, t, map.to_physical(xi)).norm());
    }
    return m;
}

std::vector<Vec2> cell_velocities(const Mesh& mesh, const Bdm1Space& space, const Eigen::VectorXd& q) {
    std::vector<Vec2> out(mesh.num_cells());
    for (int t = 0; t < mesh.num_cells(); ++t) out[t] = space.cell_average(q, t);
    return out;
}

} // namespace hmc
