#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "hmc/fespace.hpp"
#include "hmc/mesh.hpp"

namespace hmc {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplets = std::vector<Eigen::Triplet<double>>;

struct FacetCoefficients {
    double delta = 0.5;    ///< weight of the T+ side in the weighted average
    double k_e = 0.0;      ///< harmonic mean of the normal projections
    double k_plus = 0.0;
    double k_minus = 0.0;
};

/// Normal projections n^T k n of the two side tensors, their weight and harmonic mean.
FacetCoefficients facet_coefficients(const Mat2& plus, const Mat2& minus, const Vec2& normal);

inline double weighted_average(double plus, double minus, double delta) {
    return delta * plus + (1.0 - delta) * minus;
}
inline Vec2 weighted_average(const Vec2& plus, const Vec2& minus, double delta) {
    return delta * plus + (1.0 - delta) * minus;
}
/// [[z]] = z+ n+ + z- n- with n- = -n+.
inline Vec2 jump(double plus, double minus, const Vec2& n_plus) { return (plus - minus) * n_plus; }
/// [[tau]] = tau+ . n+ + tau- . n-.
inline double jump(const Vec2& plus, const Vec2& minus, const Vec2& n_plus) {
    return (plus - minus).dot(n_plus);
}

/// Local kernels fill pre-sized zero blocks (rows = test, cols = trial).
/// Interior facet blocks are ordered [T+ dofs | T- dofs].
using CellKernel = std::function<void(int cell, Eigen::MatrixXd& a, Eigen::VectorXd& b)>;
using FacetKernel = std::function<void(int facet, Eigen::MatrixXd& a, Eigen::VectorXd& b)>;

struct AssembledSystem {
    SparseMatrix matrix;
    Eigen::VectorXd rhs;
};

/// Scatters cell, interior-facet and boundary-facet contributions into a global operator.
/// Boundary facet blocks use the dofs of the single adjacent cell.
AssembledSystem assemble_operator(const Mesh& mesh, const DofMap& trial, const DofMap& test,
                                  const CellKernel& cell, const FacetKernel& interior = {},
                                  const FacetKernel& boundary = {});

/// Strongly imposed values keyed by global dof.
class Constraints {
public:
    /// Throws ConflictError when `dof` is already fixed to a different value.
    void add(int dof, double value);
    bool contains(int dof) const { return values_.count(dof) != 0; }
    double value(int dof) const { return values_.at(dof); }
    std::size_t size() const { return values_.size(); }
    const std::map<int, double>& values() const { return values_; }

private:
    std::map<int, double> values_;
};

/// Symmetric row/column elimination; the lifted columns move to the rhs.
void apply_strong_bcs(SparseMatrix& a, Eigen::VectorXd& b, const Constraints& constraints);

struct SolveReport {
    double relative_residual = 0.0;   ///< ||Ax - b||_inf / ||b||_inf
    int refinement_steps = 0;
};

/// Sparse LU with symmetric diagonal equilibration and iterative refinement.
/// Factorize once, solve many times.
class LinearSolver {
public:
    LinearSolver();
    ~LinearSolver();
    LinearSolver(LinearSolver&&) noexcept;
    LinearSolver& operator=(LinearSolver&&) noexcept;

    void factorize(const SparseMatrix& a);
    Eigen::VectorXd solve(const Eigen::VectorXd& b, SolveReport* report = nullptr) const;
    bool factorized() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// One-shot convenience wrapper.
Eigen::VectorXd solve_linear(const SparseMatrix& a, const Eigen::VectorXd& b, SolveReport* report = nullptr);

/// Writes `row col value` lines, 0-based, one per stored nonzero.
void write_coo(const SparseMatrix& a, const std::filesystem::path& path);

} // namespace hmc
