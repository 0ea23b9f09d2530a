#include "hmc/transport.hpp"

#include <algorithm>
#include <cmath>

#include "hmc/errors.hpp"
#include "hmc/quadrature.hpp"

namespace hmc {

Mat2 stabilized_diffusion(const Mat2& D_e, const Vec2& q_cell, double h, double gamma) {
    if (gamma < 0) throw InvalidArgument("stabilization gamma must be non-negative");
    return D_e + gamma * h * q_cell.norm() * Mat2::Identity();
}

double model_ceq(double p_pa, const MaterialParams& params) {
    return params.ceq_scale * equilibrium_concentration(pa_to_mpa(p_pa), params.temp);
}

Eigen::VectorXd reaction_source(const Eigen::VectorXd& c_hat_cell, const Eigen::VectorXd& p_cell,
                                const Eigen::VectorXd& A_s, const Eigen::VectorXd& phi, double dt,
                                const MaterialParams& params) {
    const auto n = c_hat_cell.size();
    Eigen::VectorXd out(n);
    for (Eigen::Index t = 0; t < n; ++t) {
        const double ceq = model_ceq(p_cell(t), params);
        double r = reaction_rate_ceq(c_hat_cell(t), ceq, params.temp, params.table) * A_s(t);
        if (params.reaction_cap && dt > 0) {
            const double lim = phi(t) * std::abs(ceq - c_hat_cell(t)) / dt;
            r = std::clamp(r, -lim, lim);
        }
        out(t) = r;
    }
    return out;
}

namespace {

struct EgLocal {
    Eigen::Matrix<double, 3, 2> grad;   // hat gradients; the enrichment gradient is zero
    CellMap map;
};

Eigen::Vector4d eg_values(const CellMap& map, const Point& x) {
    const Eigen::Vector3d l = barycentric(map.to_reference(x));
    return {l(0), l(1), l(2), 1.0};
}

// Normal-projection weight and harmonic coefficient; tolerates a vanishing tensor.
void facet_weights(const Mat2& dp, const Mat2& dm, const Vec2& n, double& delta, double& k_e) {
    const double kp = n.dot(dp * n), km = n.dot(dm * n);
    const double s = kp + km;
    if (s <= 0.0) {
        delta = 0.5;
        k_e = 0.0;
        return;
    }
    delta = km / s;
    k_e = 2.0 * kp * km / s;
}

} // namespace

TransportProblem::TransportProblem(const Mesh& mesh, const BoundaryTags& tags)
    : mesh_(&mesh), tags_(&tags), dofs_(build_dofmap(mesh, SpaceKind::eg1)) {}

AssembledSystem TransportProblem::assemble(const TransportInputs& in) const {
    const Mesh& mesh = *mesh_;
    const int nt = mesh.num_cells();
    if (!in.space) throw InvalidArgument("transport: velocity space missing");
    if (in.phi.size() != nt || static_cast<int>(in.diffusivity.size()) != nt || in.reaction.size() != nt)
        throw InvalidArgument("transport: coefficient arrays must have one entry per cell");
    if (!in.history || in.history->size() < static_cast<std::size_t>(in.bdf_order))
        throw StateError("transport: BDF" + std::to_string(in.bdf_order) + " needs " + std::to_string(in.bdf_order) +
                         " previous steps, have " + std::to_string(in.history ? in.history->size() : 0));
    if (!(in.dt > 0)) throw InvalidArgument("transport: dt must be positive");

    const auto w = bdf_coefficients(in.bdf_order);
    const TriangleRule& crule = triangle_rule(cell_quadrature_degree);
    const EdgeRule& erule = edge_rule(facet_quadrature_degree);
    const Bdm1Space& space = *in.space;

    std::vector<EgLocal> local(nt);
    for (int t = 0; t < nt; ++t) {
        local[t].map = CellMap(mesh, t);
        local[t].grad = hat_gradients(local[t].map);
    }

    auto cell = [&](int t, Eigen::MatrixXd& a, Eigen::VectorXd& b) {
        const EgLocal& L = local[t];
        const double jac = std::abs(L.map.det);
        Eigen::Matrix4d mass = Eigen::Matrix4d::Zero();
        for (std::size_t q = 0; q < crule.points.size(); ++q) {
            const Eigen::Vector2d& xi = crule.points[q];
            const Point x = L.map.to_physical(xi);
            const Eigen::Vector3d l = barycentric(xi);
            const Eigen::Vector4d v(l(0), l(1), l(2), 1.0);
            const double wq = crule.weights[q] * jac;
            mass += wq * v * v.transpose();
            const Vec2 qv = space.evaluate(in.q, t, x);
            for (int i = 0; i < 3; ++i) {
                const double adv = qv.dot(L.grad.row(i).transpose());
                for (int j = 0; j < 4; ++j) a(i, j) -= wq * adv * v(j);
            }
            if (in.source) b += wq * in.source(x) * v;
        }
        const double area = mesh.cell_area(t);
        a += (w[0] / in.dt) * in.phi(t) * mass;
        a.topLeftCorner(3, 3) += area * L.grad * in.diffusivity[t] * L.grad.transpose();

        const auto dofs = dofs_.cell_dofs(t);
        for (int k = 1; k <= in.bdf_order; ++k) {
            const Eigen::VectorXd& ch = (*in.history)[k - 1];
            Eigen::Vector4d ce;
            for (int i = 0; i < 4; ++i) ce(i) = ch(dofs[i]);
            b -= (w[k] / in.dt) * in.phi(t) * mass * ce;
        }
        b += in.reaction(t) * area * Eigen::Vector4d(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 1.0);
    };

    auto interior = [&](int f, Eigen::MatrixXd& a, Eigen::VectorXd&) {
        const auto& fc = mesh.facet_cells(f);
        const FacetGeometry geo = mesh.facet_geometry(f);
        const Vec2& n = geo.normal_plus;
        const EgLocal& P = local[fc[0]];
        const EgLocal& M = local[fc[1]];
        double delta, k_e;
        facet_weights(in.diffusivity[fc[0]], in.diffusivity[fc[1]], n, delta, k_e);
        // {D grad psi}_delta . n+ for each of the 8 local functions
        Eigen::Matrix<double, 8, 1> avg = Eigen::Matrix<double, 8, 1>::Zero();
        for (int i = 0; i < 3; ++i) {
            avg(i) = delta * (in.diffusivity[fc[0]] * P.grad.row(i).transpose()).dot(n);
            avg(4 + i) = (1.0 - delta) * (in.diffusivity[fc[1]] * M.grad.row(i).transpose()).dot(n);
        }
        const Point& lo = mesh.vertex(mesh.facet(f)[0]);
        const Point& hi = mesh.vertex(mesh.facet(f)[1]);
        const double pen = in.beta / geo.h_e * k_e;
        for (std::size_t q = 0; q < erule.points.size(); ++q) {
            const Point x = lo + erule.points[q] * (hi - lo);
            const double wq = erule.weights[q] * geo.measure;
            Eigen::Matrix<double, 8, 1> jmp;
            jmp.head<4>() = eg_values(P.map, x);
            jmp.tail<4>() = -eg_values(M.map, x);
            a += wq * (-jmp * avg.transpose() + in.theta * avg * jmp.transpose() + pen * jmp * jmp.transpose());
            const double qn = space.evaluate(in.q, fc[0], x).dot(n);
            Eigen::Matrix<double, 8, 1> up = Eigen::Matrix<double, 8, 1>::Zero();
            if (qn >= 0.0)
                up.head<4>() = jmp.head<4>();
            else
                up.tail<4>() = -jmp.tail<4>();
            a += wq * qn * jmp * up.transpose();
        }
    };

    const std::optional<double> no_cin;
    auto boundary = [&](int f, Eigen::MatrixXd& a, Eigen::VectorXd& b) {
        const int t = mesh.facet_cells(f)[0];
        const FacetGeometry geo = mesh.facet_geometry(f);
        const Vec2& n = geo.normal_plus;
        const std::optional<double>& wall_cin = tags_->has_wall(f) ? in.c_in[static_cast<int>(tags_->wall(f))] : no_cin;
        const bool has_cin = wall_cin.has_value();
        const double cin = wall_cin.value_or(0.0);
        const Point& lo = mesh.vertex(mesh.facet(f)[0]);
        const Point& hi = mesh.vertex(mesh.facet(f)[1]);
        for (std::size_t q = 0; q < erule.points.size(); ++q) {
            const Point x = lo + erule.points[q] * (hi - lo);
            const double wq = erule.weights[q] * geo.measure;
            const Eigen::Vector4d v = eg_values(local[t].map, x);
            const double qn = space.evaluate(in.q, t, x).dot(n);
            if (qn < 0.0 && has_cin)
                b -= wq * qn * cin * v;
            else
                a += wq * qn * v * v.transpose();
        }
    };

    return assemble_operator(mesh, dofs_, dofs_, cell, interior, boundary);
}

Eigen::VectorXd TransportProblem::solve(const TransportInputs& in, SolveReport* report) const {
    AssembledSystem sys = assemble(in);
    // CG1 and DG0 both contain the global constant, so (1, ..., 1 | -1, ..., -1)
    // spans the kernel. Pinning one enrichment coefficient fixes the split without
    // changing the function space; the dropped row is the sum of the vertex rows
    // minus the other cell rows, so every cell balance still holds.
    Constraints gauge;
    gauge.add(mesh_->num_vertices(), 0.0);
    apply_strong_bcs(sys.matrix, sys.rhs, gauge);
    return solve_linear(sys.matrix, sys.rhs, report);
}

Eigen::VectorXd TransportProblem::cell_balance(const TransportInputs& in, const Eigen::VectorXd& c) const {
    AssembledSystem sys = assemble(in);
    const Eigen::VectorXd r = sys.matrix * c - sys.rhs;
    return r.tail(mesh_->num_cells());
}

} // namespace hmc
