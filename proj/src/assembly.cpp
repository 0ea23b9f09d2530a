#include "hmc/assembly.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <Eigen/OrderingMethods>
#include <Eigen/SparseLU>

#include "hmc/errors.hpp"

namespace hmc {

namespace {

bool is_spd(const Mat2& k) {
    return std::abs(k(0, 1) - k(1, 0)) <= 1e-12 * k.norm() && k(0, 0) > 0.0 && k.determinant() > 0.0;
}

} // namespace

FacetCoefficients facet_coefficients(const Mat2& plus, const Mat2& minus, const Vec2& normal) {
    if (!is_spd(plus) || !is_spd(minus)) throw InvalidArgument("facet tensor is not symmetric positive definite");
    FacetCoefficients fc;
    fc.k_plus = normal.dot(plus * normal);
    fc.k_minus = normal.dot(minus * normal);  // (-n)^T k (-n) is the same number
    const double s = fc.k_plus + fc.k_minus;
    fc.delta = fc.k_minus / s;
    fc.k_e = 2.0 * fc.k_plus * fc.k_minus / s;
    return fc;
}

AssembledSystem assemble_operator(const Mesh& mesh, const DofMap& trial, const DofMap& test,
                                  const CellKernel& cell, const FacetKernel& interior,
                                  const FacetKernel& boundary) {
    const int nr = test.local_dimension(), nc = trial.local_dimension();
    Triplets trips;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(test.size());

    auto scatter = [&](const std::vector<int>& rows, const std::vector<int>& cols, const Eigen::MatrixXd& a,
                       const Eigen::VectorXd& b) {
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i] < 0 || rows[i] >= test.size()) throw std::out_of_range("assembly: row dof out of range");
            rhs(rows[i]) += b(static_cast<Eigen::Index>(i));
            for (std::size_t j = 0; j < cols.size(); ++j) {
                if (cols[j] < 0 || cols[j] >= trial.size())
                    throw std::out_of_range("assembly: column dof out of range");
                const double v = a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
                if (v != 0.0) trips.emplace_back(rows[i], cols[j], v);
            }
        }
    };

    Eigen::MatrixXd a;
    Eigen::VectorXd b;
    if (cell) {
        for (int t = 0; t < mesh.num_cells(); ++t) {
            a.setZero(nr, nc);
            b.setZero(nr);
            cell(t, a, b);
            scatter(test.cell_dofs(t), trial.cell_dofs(t), a, b);
        }
    }
    if (interior || boundary) {
        for (int f = 0; f < mesh.num_facets(); ++f) {
            const auto& fc = mesh.facet_cells(f);
            if (fc[1] >= 0 && interior) {
                a.setZero(2 * nr, 2 * nc);
                b.setZero(2 * nr);
                interior(f, a, b);
                auto rows = test.cell_dofs(fc[0]);
                auto rm = test.cell_dofs(fc[1]);
                rows.insert(rows.end(), rm.begin(), rm.end());
                auto cols = trial.cell_dofs(fc[0]);
                auto cm = trial.cell_dofs(fc[1]);
                cols.insert(cols.end(), cm.begin(), cm.end());
                scatter(rows, cols, a, b);
            } else if (fc[1] < 0 && boundary) {
                a.setZero(nr, nc);
                b.setZero(nr);
                boundary(f, a, b);
                scatter(test.cell_dofs(fc[0]), trial.cell_dofs(fc[0]), a, b);
            }
        }
    }
    AssembledSystem sys;
    sys.matrix.resize(test.size(), trial.size());
    sys.matrix.setFromTriplets(trips.begin(), trips.end());
    sys.rhs = std::move(rhs);
    return sys;
}

void Constraints::add(int dof, double value) {
    auto [it, inserted] = values_.emplace(dof, value);
    if (!inserted && it->second != value) {
        std::ostringstream os;
        os << "conflicting constraints on dof " << dof << ": " << it->second << " vs " << value;
        throw ConflictError(os.str());
    }
}

void apply_strong_bcs(SparseMatrix& a, Eigen::VectorXd& b, const Constraints& constraints) {
    if (constraints.size() == 0) return;
    const auto n = a.rows();
    std::vector<char> fixed(static_cast<std::size_t>(n), 0);
    Eigen::VectorXd vals = Eigen::VectorXd::Zero(n);
    for (const auto& [dof, v] : constraints.values()) {
        if (dof < 0 || dof >= n) throw InvalidArgument("constraint on out-of-range dof " + std::to_string(dof));
        fixed[dof] = 1;
        vals(dof) = v;
    }
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
    for (int j = 0; j < a.outerSize(); ++j) {
        for (SparseMatrix::InnerIterator it(a, j); it; ++it) {
            const auto i = it.row();
            if (i == j) diag(i) = it.value();
            if (fixed[j] && !fixed[i]) b(i) -= it.value() * vals(j);
            if (fixed[i] || fixed[j]) it.valueRef() = 0.0;
        }
    }
    a.prune(0.0);
    for (const auto& [dof, v] : constraints.values()) {
        const double d = diag(dof) != 0.0 ? std::abs(diag(dof)) : 1.0;
        a.coeffRef(dof, dof) = d;
        b(dof) = d * v;
    }
    a.makeCompressed();
}

struct LinearSolver::Impl {
    Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
    SparseMatrix scaled;
    SparseMatrix original;
    Eigen::VectorXd scale;
    bool ready = false;
};

LinearSolver::LinearSolver() : impl_(std::make_unique<Impl>()) {}
LinearSolver::~LinearSolver() = default;
LinearSolver::LinearSolver(LinearSolver&&) noexcept = default;
LinearSolver& LinearSolver::operator=(LinearSolver&&) noexcept = default;

bool LinearSolver::factorized() const { return impl_->ready; }

void LinearSolver::factorize(const SparseMatrix& a) {
    if (a.rows() != a.cols()) throw InvalidArgument("solve: matrix is not square");
    auto& s = *impl_;
    s.original = a;
    s.original.makeCompressed();
    // symmetric scaling by the inverse square root of each row's largest entry
    Eigen::VectorXd rowmax = Eigen::VectorXd::Zero(a.rows());
    for (int j = 0; j < s.original.outerSize(); ++j)
        for (SparseMatrix::InnerIterator it(s.original, j); it; ++it)
            rowmax(it.row()) = std::max(rowmax(it.row()), std::abs(it.value()));
    s.scale.resize(a.rows());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        if (rowmax(i) == 0.0) throw SolverError("singular matrix: zero pivot, row " + std::to_string(i) + " is empty");
        s.scale(i) = 1.0 / std::sqrt(rowmax(i));
    }
    s.scaled = s.scale.asDiagonal() * s.original * s.scale.asDiagonal();
    s.scaled.makeCompressed();
    s.lu.analyzePattern(s.scaled);
    s.lu.factorize(s.scaled);
    if (s.lu.info() != Eigen::Success) {
        s.ready = false;
        throw SolverError("singular matrix (zero pivot): " + s.lu.lastErrorMessage());
    }
    s.ready = true;
}

Eigen::VectorXd LinearSolver::solve(const Eigen::VectorXd& b, SolveReport* report) const {
    const auto& s = *impl_;
    if (!s.ready) throw StateError("solve called before factorize");
    if (b.size() != s.original.rows()) throw InvalidArgument("solve: rhs size mismatch");
    Eigen::VectorXd x = s.scale.asDiagonal() * s.lu.solve(s.scale.asDiagonal() * b);
    const double bn = b.lpNorm<Eigen::Infinity>();
    const double denom = bn > 0.0 ? bn : 1.0;
    double res = (s.original * x - b).lpNorm<Eigen::Infinity>() / denom;
    int steps = 0;
    while (steps < 3 && res > 1e-14) {
        Eigen::VectorXd r = b - s.original * x;
        Eigen::VectorXd dx = s.scale.asDiagonal() * s.lu.solve(s.scale.asDiagonal() * r);
        Eigen::VectorXd xn = x + dx;
        const double rn = (s.original * xn - b).lpNorm<Eigen::Infinity>() / denom;
        ++steps;
        if (!(rn < res)) break;
        x = std::move(xn);
        res = rn;
    }
    if (!std::isfinite(res)) throw SolverError("solve produced non-finite values");
    if (report) {
        report->relative_residual = res;
        report->refinement_steps = steps;
    }
    return x;
}

Eigen::VectorXd solve_linear(const SparseMatrix& a, const Eigen::VectorXd& b, SolveReport* report) {
    LinearSolver s;
    s.factorize(a);
    return s.solve(b, report);
}

void write_coo(const SparseMatrix& a, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << std::setprecision(17);
    for (int j = 0; j < a.outerSize(); ++j)
        for (SparseMatrix::InnerIterator it(a, j); it; ++it) out << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
}

} // namespace hmc
