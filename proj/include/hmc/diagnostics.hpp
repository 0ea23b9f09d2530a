#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "hmc/mesh.hpp"
#include "hmc/poroelastic.hpp"

namespace hmc {

/// Cellwise snapshots entering the discrete mass balance of one step.
struct MassBalanceInputs {
    Eigen::VectorXd storage;         ///< 1/M + alpha^2/K per cell
    Eigen::VectorXd p, p_prev;
    Eigen::VectorXd sigma, sigma_prev;   ///< sigma_v snapshots used in assembly
    Eigen::VectorXd phi_c, phi_c_prev;   ///< chemical porosity snapshots used in assembly
    Eigen::VectorXd g;               ///< volumetric source per cell
    Eigen::VectorXd q;               ///< BDM1 moments
    double alpha = 0.0;
    double K = 1.0;
    double dt = 0.0;
};

struct MassResidualField {
    Eigen::VectorXd r;                ///< per-cell residual, m^3/s
    double max_abs = 0.0;
    std::vector<double> facet_flux;   ///< flux through each facet along its global normal
    double volume_total = 0.0;        ///< sum of cell rate terms minus sources
    double boundary_total = 0.0;      ///< net outward boundary flux
    double scale = 0.0;               ///< sum of magnitudes, for relative comparisons
};

/// Storage, stress-rate and chemistry-rate terms plus the BDM facet fluxes of every cell.
/// Flux-boundary facets take the prescribed -q_D |e|; pressure-boundary facets the outward BDM flux.
MassResidualField local_mass_residual(const Mesh& mesh, const BoundaryTags& tags,
                                      const WallBCs& bcs, const MassBalanceInputs& in);

/// |sum r - (volume + boundary)| / scale; pairwise interior cancellation makes it round-off small.
double telescoping_defect(const MassResidualField& field);

struct DofReport {
    int vertices = 0, facets = 0, cells = 0;
    int cg2_vector = 0, bdm1 = 0, dg0 = 0, eg1 = 0;
    int euler = 0;   ///< V - E + T
    bool identities_hold = false;
};

DofReport dof_report(const Mesh& mesh);
/// Checks the closed-form identities on bare counts (V, E, T) and the dof quadruple.
bool dof_identities(int V, int E, int T, int cg2_vector, int bdm1, int dg0, int eg1);
std::string format_dof_report(const DofReport& r);

struct FieldStats {
    double min = 0.0, max = 0.0, mean = 0.0;
};
FieldStats field_stats(const Eigen::VectorXd& v);

} // namespace hmc
