#include "hmc/diagnostics.hpp"

#include <cmath>
#include <sstream>

#include "hmc/errors.hpp"
#include "hmc/fespace.hpp"

namespace hmc {

MassResidualField local_mass_residual(const Mesh& mesh, const BoundaryTags& tags,
                                      const WallBCs& bcs, const MassBalanceInputs& in) {
    const int nt = mesh.num_cells();
    if (!(in.dt > 0)) throw StateError("mass residual needs a completed step (dt > 0)");
    if (in.p_prev.size() != nt || in.sigma_prev.size() != nt || in.phi_c_prev.size() != nt)
        throw StateError("mass residual needs previous-step snapshots");

    MassResidualField out;
    out.r = Eigen::VectorXd::Zero(nt);
    out.facet_flux.assign(mesh.num_facets(), 0.0);
    for (int f = 0; f < mesh.num_facets(); ++f) out.facet_flux[f] = in.q(2 * f);
    for (int f = 0; f < mesh.num_facets(); ++f) {
        if (!mesh.is_boundary(f) || !tags.has_wall(f)) continue;
        const WallBC& bc = bcs[static_cast<int>(tags.wall(f))];
        if (bc.flow == FlowBC::flux) {
            const int t = mesh.facet_cells(f)[0];
            const double s = mesh.facet_sign(t, mesh.local_facet_index(t, f));
            out.facet_flux[f] = -bc.flux * mesh.facet_length(f) * s;
        }
    }

    double scale = 0.0;
    for (int t = 0; t < nt; ++t) {
        const double area = mesh.cell_area(t);
        const double vol = area * (in.storage(t) * (in.p(t) - in.p_prev(t)) +
                                   in.alpha / in.K * (in.sigma(t) - in.sigma_prev(t)) + (in.phi_c(t) - in.phi_c_prev(t))) /
                               in.dt -
                           area * in.g(t);
        double flux = 0.0;
        for (int i = 0; i < 3; ++i) {
            const int f = mesh.cell_facets(t)[i];
            const double fl = mesh.facet_sign(t, i) * out.facet_flux[f];
            flux += fl;
            scale += std::abs(fl);
            if (mesh.is_boundary(f)) out.boundary_total += fl;
        }
        out.r(t) = vol + flux;
        out.volume_total += vol;
        scale += std::abs(vol);
    }
    out.scale = scale;
    out.max_abs = nt ? out.r.cwiseAbs().maxCoeff() : 0.0;
    return out;
}

double telescoping_defect(const MassResidualField& field) {
    const double total = field.r.sum();
    const double d = std::abs(total - (field.volume_total + field.boundary_total));
    return field.scale > 0.0 ? d / field.scale : d;
}

bool dof_identities(int V, int E, int T, int cg2_vector, int bdm1, int dg0, int eg1) {
    return cg2_vector == expected_dofs(SpaceKind::cg2_vector, V, E, T) && bdm1 == expected_dofs(SpaceKind::bdm1, V, E, T) &&
           dg0 == expected_dofs(SpaceKind::dg0, V, E, T) && eg1 == expected_dofs(SpaceKind::eg1, V, E, T) &&
           V - E + T == 1;
}

DofReport dof_report(const Mesh& mesh) {
    if (mesh.num_cells() == 0) throw InvalidArgument("dof report: mesh is empty");
    DofReport r;
    r.vertices = mesh.num_vertices();
    r.facets = mesh.num_facets();
    r.cells = mesh.num_cells();
    r.cg2_vector = build_dofmap(mesh, SpaceKind::cg2_vector).size();
    r.bdm1 = build_dofmap(mesh, SpaceKind::bdm1).size();
    r.dg0 = build_dofmap(mesh, SpaceKind::dg0).size();
    r.eg1 = build_dofmap(mesh, SpaceKind::eg1).size();
    r.euler = r.vertices - r.facets + r.cells;
    r.identities_hold = dof_identities(r.vertices, r.facets, r.cells, r.cg2_vector, r.bdm1, r.dg0, r.eg1);
    return r;
}

std::string format_dof_report(const DofReport& r) {
    std::ostringstream os;
    os << "vertices    " << r.vertices << "\n"
       << "facets      " << r.facets << "\n"
       << "cells       " << r.cells << "\n"
       << "V - E + T   " << r.euler << "\n"
       << "u  CG2-vec  " << r.cg2_vector << "\n"
       << "q  BDM1     " << r.bdm1 << "\n"
       << "p  DG0      " << r.dg0 << "\n"
       << "c  EG1      " << r.eg1 << "\n"
       << "identities  " << (r.identities_hold ? "ok" : "VIOLATED") << "\n";
    return os.str();
}

FieldStats field_stats(const Eigen::VectorXd& v) {
    FieldStats s;
    if (v.size() == 0) return s;
    s.min = v.minCoeff();
    s.max = v.maxCoeff();
    s.mean = v.mean();
    return s;
}

} // namespace hmc
