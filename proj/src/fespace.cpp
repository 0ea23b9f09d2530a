#include "hmc/fespace.hpp"

#include <Eigen/LU>

#include "hmc/errors.hpp"
#include "hmc/quadrature.hpp"

namespace hmc {

const char* to_string(SpaceKind k) {
    switch (k) {
    case SpaceKind::cg1: return "CG1";
    case SpaceKind::cg2_vector: return "CG2-vector";
    case SpaceKind::dg0: return "DG0";
    case SpaceKind::eg1: return "EG1";
    case SpaceKind::bdm1: return "BDM1";
    }
    return "?";
}

int local_dimension(SpaceKind k) {
    switch (k) {
    case SpaceKind::cg1: return 3;
    case SpaceKind::cg2_vector: return 12;
    case SpaceKind::dg0: return 1;
    case SpaceKind::eg1: return 4;
    case SpaceKind::bdm1: return 6;
    }
    return 0;
}

int value_dimension(SpaceKind k) {
    return (k == SpaceKind::cg2_vector || k == SpaceKind::bdm1) ? 2 : 1;
}

int expected_dofs(SpaceKind kind, int nv, int nf, int nt) {
    switch (kind) {
    case SpaceKind::cg1: return nv;
    case SpaceKind::cg2_vector: return 2 * (nv + nf);
    case SpaceKind::dg0: return nt;
    case SpaceKind::eg1: return nv + nt;
    case SpaceKind::bdm1: return 2 * nf;
    }
    return 0;
}

DofMap build_dofmap(const Mesh& mesh, SpaceKind kind) {
    const int nv = mesh.num_vertices(), nf = mesh.num_facets(), nt = mesh.num_cells();
    const int ld = local_dimension(kind);
    const int n = expected_dofs(kind, nv, nf, nt);
    std::vector<int> dofs;
    dofs.reserve(static_cast<std::size_t>(ld) * nt);
    std::vector<DofEntity> ent(n);

    for (int t = 0; t < nt; ++t) {
        const auto& c = mesh.cell(t);
        const auto& cf = mesh.cell_facets(t);
        switch (kind) {
        case SpaceKind::cg1:
            for (int v : c) dofs.push_back(v);
            break;
        case SpaceKind::cg2_vector: {
            std::array<int, 6> nodes{c[0], c[1], c[2], nv + cf[0], nv + cf[1], nv + cf[2]};
            for (int node : nodes)
                for (int comp = 0; comp < 2; ++comp) dofs.push_back(2 * node + comp);
            break;
        }
        case SpaceKind::dg0:
            dofs.push_back(t);
            break;
        case SpaceKind::eg1:
            for (int v : c) dofs.push_back(v);
            dofs.push_back(nv + t);
            break;
        case SpaceKind::bdm1:
            for (int f : cf) {
                dofs.push_back(2 * f);
                dofs.push_back(2 * f + 1);
            }
            break;
        }
    }

    switch (kind) {
    case SpaceKind::cg1:
        for (int v = 0; v < nv; ++v) ent[v] = {EntityKind::vertex, v};
        break;
    case SpaceKind::cg2_vector:
        for (int node = 0; node < nv + nf; ++node)
            for (int comp = 0; comp < 2; ++comp)
                ent[2 * node + comp] = node < nv ? DofEntity{EntityKind::vertex, node}
                                                 : DofEntity{EntityKind::facet, node - nv};
        break;
    case SpaceKind::dg0:
        for (int t = 0; t < nt; ++t) ent[t] = {EntityKind::cell, t};
        break;
    case SpaceKind::eg1:
        for (int v = 0; v < nv; ++v) ent[v] = {EntityKind::vertex, v};
        for (int t = 0; t < nt; ++t) ent[nv + t] = {EntityKind::cell, t};
        break;
    case SpaceKind::bdm1:
        for (int f = 0; f < nf; ++f) ent[2 * f] = ent[2 * f + 1] = {EntityKind::facet, f};
        break;
    }
    return DofMap(kind, n, ld, std::move(dofs), std::move(ent));
}

CellMap::CellMap(const Mesh& mesh, int t) {
    const auto& c = mesh.cell(t);
    origin = mesh.vertex(c[0]);
    jacobian.col(0) = mesh.vertex(c[1]) - origin;
    jacobian.col(1) = mesh.vertex(c[2]) - origin;
    det = jacobian.determinant();
    inverse_t = jacobian.inverse().transpose();
}

Eigen::Vector2d CellMap::to_reference(const Point& x) const {
    return inverse_t.transpose() * (x - origin);
}

namespace {

const Eigen::Matrix<double, 3, 2>& reference_hat_gradients() {
    static const Eigen::Matrix<double, 3, 2> g = (Eigen::Matrix<double, 3, 2>() << -1, -1, 1, 0, 0, 1).finished();
    return g;
}

void p2_reference(const Eigen::Vector2d& xi, const Eigen::Matrix<double, 3, 2>& dl,
                  Eigen::Matrix<double, 6, 1>& val, Eigen::Matrix<double, 6, 2>& grad) {
    const Eigen::Vector3d l = barycentric(xi);
    for (int i = 0; i < 3; ++i) {
        val(i) = l(i) * (2.0 * l(i) - 1.0);
        grad.row(i) = (4.0 * l(i) - 1.0) * dl.row(i);
        const int j = (i + 1) % 3, k = (i + 2) % 3;
        val(3 + i) = 4.0 * l(j) * l(k);
        grad.row(3 + i) = 4.0 * (l(k) * dl.row(j) + l(j) * dl.row(k));
    }
}

} // namespace

Eigen::Matrix<double, 3, 2> hat_gradients(const CellMap& map) {
    return reference_hat_gradients() * map.inverse_t.transpose();
}

void p2_basis(const CellMap& map, const Eigen::Vector2d& xi, Eigen::Matrix<double, 6, 1>& values,
              Eigen::Matrix<double, 6, 2>& grads) {
    p2_reference(xi, hat_gradients(map), values, grads);
}

BasisValues eval_basis(SpaceKind kind, const Eigen::Vector2d& xi) {
    constexpr double tol = 1e-12;
    if (xi.x() < -tol || xi.y() < -tol || xi.x() + xi.y() > 1.0 + tol)
        throw DomainError("point outside the reference triangle");
    BasisValues b;
    const auto& dl = reference_hat_gradients();
    const Eigen::Vector3d l = barycentric(xi);
    switch (kind) {
    case SpaceKind::cg1:
        b.values = l;
        b.gradients = dl;
        break;
    case SpaceKind::dg0:
        b.values = Eigen::MatrixXd::Ones(1, 1);
        b.gradients = Eigen::MatrixXd::Zero(1, 2);
        break;
    case SpaceKind::eg1:
        b.values.resize(4, 1);
        b.values << l, 1.0;
        b.gradients = Eigen::MatrixXd::Zero(4, 2);
        b.gradients.topRows(3) = dl;
        break;
    case SpaceKind::cg2_vector: {
        Eigen::Matrix<double, 6, 1> v;
        Eigen::Matrix<double, 6, 2> g;
        p2_reference(xi, dl, v, g);
        b.values = Eigen::MatrixXd::Zero(12, 2);
        b.gradients = Eigen::MatrixXd::Zero(12, 4);
        b.divergence.resize(12);
        for (int node = 0; node < 6; ++node) {
            for (int comp = 0; comp < 2; ++comp) {
                const int k = 2 * node + comp;
                b.values(k, comp) = v(node);
                b.gradients(k, 2 * comp) = g(node, 0);
                b.gradients(k, 2 * comp + 1) = g(node, 1);
                b.divergence(k) = g(node, comp);
            }
        }
        break;
    }
    case SpaceKind::bdm1: {
        const std::array<Point, 3> verts{Point(0, 0), Point(1, 0), Point(0, 1)};
        Bdm1Cell cell(verts, {0, 1, 2});
        b.values = cell.values(xi);
        b.divergence = cell.divergence();
        // basis is affine, so central differences are exact
        b.gradients.resize(6, 4);
        const double h = 1e-3;
        const Eigen::Matrix<double, 6, 2> dx = (cell.values(xi + Eigen::Vector2d(h, 0)) - cell.values(xi - Eigen::Vector2d(h, 0))) / (2 * h);
        const Eigen::Matrix<double, 6, 2> dy = (cell.values(xi + Eigen::Vector2d(0, h)) - cell.values(xi - Eigen::Vector2d(0, h))) / (2 * h);
        b.gradients.col(0) = dx.col(0);
        b.gradients.col(1) = dy.col(0);
        b.gradients.col(2) = dx.col(1);
        b.gradients.col(3) = dy.col(1);
        break;
    }
    }
    return b;
}

Bdm1Cell::Bdm1Cell(const Mesh& mesh, int t) {
    const auto& c = mesh.cell(t);
    build({mesh.vertex(c[0]), mesh.vertex(c[1]), mesh.vertex(c[2])}, c);
}

Bdm1Cell::Bdm1Cell(const std::array<Point, 3>& verts, const std::array<int, 3>& ids) {
    build(verts, ids);
}

namespace {

// Columns: (1,0) (xi,0) (eta,0) (0,1) (0,xi) (0,eta) in scaled local coordinates.
Eigen::Matrix<double, 6, 2> monomials(const Point& x, const Point& center, double scale) {
    const Eigen::Vector2d s = (x - center) / scale;
    Eigen::Matrix<double, 6, 2> m = Eigen::Matrix<double, 6, 2>::Zero();
    m(0, 0) = 1.0;
    m(1, 0) = s.x();
    m(2, 0) = s.y();
    m(3, 1) = 1.0;
    m(4, 1) = s.x();
    m(5, 1) = s.y();
    return m;
}

} // namespace

void Bdm1Cell::build(const std::array<Point, 3>& verts, const std::array<int, 3>& ids) {
    center_ = (verts[0] + verts[1] + verts[2]) / 3.0;
    scale_ = std::max({(verts[1] - verts[0]).norm(), (verts[2] - verts[1]).norm(), (verts[0] - verts[2]).norm()});
    const EdgeRule& rule = edge_rule(3);
    Eigen::Matrix<double, 6, 6> moments = Eigen::Matrix<double, 6, 6>::Zero();
    for (int i = 0; i < 3; ++i) {
        int a = (i + 1) % 3, b = (i + 2) % 3;
        if (ids[a] > ids[b]) std::swap(a, b);
        const Point& lo = verts[a];
        const Point& hi = verts[b];
        const double len = (hi - lo).norm();
        const Vec2 tan = (hi - lo) / len;
        const Vec2 n(tan.y(), -tan.x());
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const double s = rule.points[q];
            const double w = rule.weights[q] * len;
            const Eigen::Matrix<double, 6, 1> mn = monomials(lo + s * (hi - lo), center_, scale_) * n;
            moments.row(2 * i) += w * mn.transpose();
            moments.row(2 * i + 1) += w * (2.0 * s - 1.0) * mn.transpose();
        }
    }
    coeff_ = moments.inverse();
    Eigen::Matrix<double, 6, 1> mono_div = Eigen::Matrix<double, 6, 1>::Zero();
    mono_div(1) = 1.0 / scale_;
    mono_div(5) = 1.0 / scale_;
    div_ = coeff_.transpose() * mono_div;
}

Eigen::Matrix<double, 6, 2> Bdm1Cell::values(const Point& x) const {
    return coeff_.transpose() * monomials(x, center_, scale_);
}

Bdm1Space::Bdm1Space(const Mesh& mesh) : mesh_(&mesh), dofs_(build_dofmap(mesh, SpaceKind::bdm1)) {
    cells_.reserve(mesh.num_cells());
    for (int t = 0; t < mesh.num_cells(); ++t) cells_.emplace_back(mesh, t);
}

Vec2 Bdm1Space::evaluate(const Eigen::VectorXd& coeffs, int t, const Point& x) const {
    const auto vals = cells_[t].values(x);
    const auto& cf = mesh_->cell_facets(t);
    Vec2 v = Vec2::Zero();
    for (int i = 0; i < 3; ++i)
        for (int m = 0; m < 2; ++m) v += coeffs(2 * cf[i] + m) * vals.row(2 * i + m).transpose();
    return v;
}

double Bdm1Space::divergence(const Eigen::VectorXd& coeffs, int t) const {
    const auto& d = cells_[t].divergence();
    const auto& cf = mesh_->cell_facets(t);
    double s = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int m = 0; m < 2; ++m) s += coeffs(2 * cf[i] + m) * d(2 * i + m);
    return s;
}

Vec2 Bdm1Space::cell_average(const Eigen::VectorXd& coeffs, int t) const {
    // linear field: the mean equals the value at the centroid
    return evaluate(coeffs, t, mesh_->centroid(t));
}

std::array<double, 2> facet_moments(const Mesh& mesh, int f, const VectorField& field) {
    const Point& lo = mesh.vertex(mesh.facet(f)[0]);
    const Point& hi = mesh.vertex(mesh.facet(f)[1]);
    const double len = (hi - lo).norm();
    const Vec2 n = mesh.facet_normal(f);
    const EdgeRule& rule = edge_rule(7);
    std::array<double, 2> m{0.0, 0.0};
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
        const double s = rule.points[q];
        const double v = field(lo + s * (hi - lo)).dot(n) * rule.weights[q] * len;
        m[0] += v;
        m[1] += (2.0 * s - 1.0) * v;
    }
    return m;
}

Eigen::VectorXd bdm1_interpolate(const Mesh& mesh, const VectorField& field) {
    Eigen::VectorXd out(2 * mesh.num_facets());
    for (int f = 0; f < mesh.num_facets(); ++f) {
        auto m = facet_moments(mesh, f, field);
        out(2 * f) = m[0];
        out(2 * f + 1) = m[1];
    }
    return out;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> eg_split(const Mesh& mesh, const Eigen::VectorXd& coeffs) {
    const int nv = mesh.num_vertices(), nt = mesh.num_cells();
    if (coeffs.size() != nv + nt)
        throw InvalidArgument("EG1 vector has length " + std::to_string(coeffs.size()) + ", expected " +
                              std::to_string(nv + nt));
    return {coeffs.head(nv), coeffs.tail(nt)};
}

Eigen::VectorXd eg_combine(const Eigen::VectorXd& cg_part, const Eigen::VectorXd& dg_part) {
    Eigen::VectorXd out(cg_part.size() + dg_part.size());
    out << cg_part, dg_part;
    return out;
}

double eg_evaluate(const Mesh& mesh, const Eigen::VectorXd& coeffs, int t, const Eigen::Vector2d& xi) {
    const auto& c = mesh.cell(t);
    const Eigen::Vector3d l = barycentric(xi);
    return l(0) * coeffs(c[0]) + l(1) * coeffs(c[1]) + l(2) * coeffs(c[2]) + coeffs(mesh.num_vertices() + t);
}

double eg_cell_average(const Mesh& mesh, const Eigen::VectorXd& coeffs, int t) {
    const auto& c = mesh.cell(t);
    return (coeffs(c[0]) + coeffs(c[1]) + coeffs(c[2])) / 3.0 + coeffs(mesh.num_vertices() + t);
}

} // namespace hmc
