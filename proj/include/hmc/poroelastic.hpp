#pragma once

#include <array>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "hmc/assembly.hpp"
#include "hmc/fespace.hpp"
#include "hmc/mesh.hpp"

namespace hmc {

enum class MechanicsBC { roller, traction, fixed, free };
enum class FlowBC { flux, pressure };

const char* to_string(MechanicsBC b);
const char* to_string(FlowBC b);

/// Boundary data of one wall for every equation.
struct WallBC {
    MechanicsBC mechanics = MechanicsBC::roller;
    Vec2 traction = Vec2::Zero();      ///< Pa, used when mechanics == traction
    FlowBC flow = FlowBC::flux;
    double flux = 0.0;                 ///< injected (inward) Darcy flux, m/s
    double pressure = 0.0;             ///< Pa, used when flow == pressure
    std::optional<double> c_in;        ///< inflow concentration
};

using WallBCs = std::array<WallBC, 4>;  // indexed by Wall

/// Plane-strain linear elasticity with a frozen pore pressure; the stiffness
/// does not change in time, so it is factorized once.
class MomentumProblem {
public:
    MomentumProblem(const Mesh& mesh, const BoundaryTags& tags, const WallBCs& bcs, double lambda, double shear);

    /// Displacement for a cellwise pressure (Pa) and body force.
    Eigen::VectorXd solve(const Eigen::VectorXd& p_cell, double alpha, const Vec2& body_force = Vec2::Zero()) const;
    const DofMap& dofmap() const { return dofs_; }
    const SparseMatrix& stiffness() const { return stiffness_; }
    const SolveReport& last_report() const { return report_; }

    /// Cell averages of div u.
    Eigen::VectorXd volumetric_strain(const Eigen::VectorXd& u) const;
    /// Cell-averaged effective stress (xx, yy, xy, zz) in plane strain.
    std::vector<Eigen::Vector4d> effective_stress(const Eigen::VectorXd& u) const;

private:
    const Mesh* mesh_;
    DofMap dofs_;
    double lambda_, shear_;
    SparseMatrix stiffness_;       // unconstrained
    SparseMatrix constrained_;
    Constraints constraints_;
    Eigen::VectorXd traction_load_;
    LinearSolver solver_;
    mutable SolveReport report_;
};

/// sigma_v = K eps_v - alpha p, cellwise (K = lambda + 2 mu / 3 in plane strain).
Eigen::VectorXd volumetric_stress(const Eigen::VectorXd& eps_v, const Eigen::VectorXd& p, double K, double alpha);

/// (alpha / K)(sigma_iter - sigma_prev) / dt per cell.
Eigen::VectorXd fixed_stress_source(const Eigen::VectorXd& sigma_iter, const Eigen::VectorXd& sigma_prev, double dt,
                                    double alpha, double K);

/// Per-cell coefficients of the mixed flow block.
struct FlowInputs {
    std::vector<Mat2> permeability;   ///< k per cell
    Eigen::VectorXd viscosity;        ///< mu per cell
    Eigen::VectorXd storage;          ///< 1/M + alpha^2/K per cell (0 for steady)
    Eigen::VectorXd p_prev;           ///< previous-step pressure
    Eigen::VectorXd rate_source;      ///< frozen stress and chemistry rates per cell, 1/s
    Eigen::VectorXd g;                ///< volumetric source per cell, 1/s
    double dt = 1.0;
    /// Optional pointwise source and boundary pressure for manufactured problems.
    ScalarField g_field;
    ScalarField p_boundary;
};

struct FlowSolution {
    Eigen::VectorXd q;   ///< BDM1 moments
    Eigen::VectorXd p;   ///< DG0 values
    SolveReport report;
};

/// Mixed BDM1 x DG0 Darcy block with BDF1 storage:
///   [ A   -B ] [q]   [ -<p_D, psi.n> ]
///   [ -B^T -C ] [p] = [ -(C p_prev - rate + g) ]
/// with A = (mu k^{-1} q, psi), B = (p, div psi), C = S |T| / dt.
class FlowProblem {
public:
    FlowProblem(const Mesh& mesh, const BoundaryTags& tags, const WallBCs& bcs);

    FlowSolution solve(const FlowInputs& in) const;
    AssembledSystem assemble(const FlowInputs& in) const;
    const Bdm1Space& space() const { return space_; }
    /// Strongly imposed facet moments (boundary flux facets).
    const Constraints& constraints() const { return constraints_; }
    int num_velocity_dofs() const { return space_.dofmap().size(); }

    /// Outward flux through boundary facet f of a solution.
    double boundary_outflow(const Eigen::VectorXd& q, int f) const;

private:
    const Mesh* mesh_;
    const BoundaryTags* tags_;
    WallBCs bcs_;
    Bdm1Space space_;
    Constraints constraints_;
};

/// Largest Euclidean norm of a BDM1 field over the cell quadrature points.
double max_velocity_norm(const Mesh& mesh, const Bdm1Space& space, const Eigen::VectorXd& q);

/// Cellwise mean Darcy velocity and its norm.
std::vector<Vec2> cell_velocities(const Mesh& mesh, const Bdm1Space& space, const Eigen::VectorXd& q);

} // namespace hmc
