#pragma once

#include <array>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "hmc/assembly.hpp"
#include "hmc/constitutive.hpp"
#include "hmc/fespace.hpp"
#include "hmc/mesh.hpp"
#include "hmc/timestepping.hpp"

namespace hmc {

/// D* = D_e + gamma h |q| I.
Mat2 stabilized_diffusion(const Mat2& D_e, const Vec2& q_cell, double h, double gamma);

/// c+ when q.n+ >= 0, c- otherwise.
inline double upwind_trace(double c_plus, double c_minus, double q_dot_n) {
    return q_dot_n >= 0.0 ? c_plus : c_minus;
}

struct TransportInputs {
    const Bdm1Space* space = nullptr;
    Eigen::VectorXd q;                   ///< BDM1 moments of the Darcy velocity
    Eigen::VectorXd phi;                 ///< porosity per cell
    std::vector<Mat2> diffusivity;       ///< D* per cell
    Eigen::VectorXd reaction;            ///< explicit R_c A_s per cell
    const HistoryRing<Eigen::VectorXd>* history = nullptr;  ///< c^{n-1}, c^{n-2}, ... newest first
    int bdf_order = 1;
    double dt = 1.0;
    std::array<std::optional<double>, 4> c_in;  ///< inflow concentration per wall
    double theta = -1.0;
    double beta = 1.1;
    ScalarField source;                  ///< optional pointwise source (manufactured problems)
};

/// EG1 advection-diffusion-reaction operator with weighted interior penalty
/// and upwinding. Inflow points on walls without an inflow concentration
/// carry the interior trace, like outflow.
class TransportProblem {
public:
    TransportProblem(const Mesh& mesh, const BoundaryTags& tags);

    AssembledSystem assemble(const TransportInputs& in) const;
    Eigen::VectorXd solve(const TransportInputs& in, SolveReport* report = nullptr) const;

    /// Enrichment-row residuals: per cell, storage rate + numerical facet
    /// fluxes - reaction - sources, evaluated for a given solution.
    Eigen::VectorXd cell_balance(const TransportInputs& in, const Eigen::VectorXd& c) const;

    const DofMap& dofmap() const { return dofs_; }

private:
    const Mesh* mesh_;
    const BoundaryTags* tags_;
    DofMap dofs_;
};

/// Explicit reaction term R_c(c_hat, p) A_s per cell. With `cap`, the rate is
/// limited so that one step of length dt cannot carry c_hat past equilibrium.
Eigen::VectorXd reaction_source(const Eigen::VectorXd& c_hat_cell, const Eigen::VectorXd& p_cell,
                                const Eigen::VectorXd& A_s, const Eigen::VectorXd& phi, double dt,
                                const MaterialParams& params);

/// Equilibrium concentration per cell in model units (scaled solubility).
double model_ceq(double p_pa, const MaterialParams& params);

} // namespace hmc
