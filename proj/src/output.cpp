#include "hmc/output.hpp"

#include <iomanip>
#include <sstream>

#include "hmc/errors.hpp"

namespace hmc {

namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << std::setprecision(17);
    return out;
}

void scalar_block(std::ofstream& out, const char* name, const Eigen::VectorXd& v) {
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (Eigen::Index i = 0; i < v.size(); ++i) out << v(i) << '\n';
}

} // namespace

void write_vtk(const Mesh& mesh, const VtkFrame& frame, const std::filesystem::path& path) {
    const int nv = mesh.num_vertices(), nt = mesh.num_cells();
    auto check = [&](const Eigen::VectorXd& v, Eigen::Index n, const char* name) {
        if (v.size() != 0 && v.size() != n)
            throw InvalidArgument(std::string("write_vtk: field ") + name + " has size " + std::to_string(v.size()));
    };
    check(frame.u, 2 * (nv + mesh.num_facets()), "u");
    check(frame.c, nv + nt, "c");
    check(frame.p, nt, "p");
    check(frame.phi, nt, "phi");
    check(frame.dphic_dt, nt, "dphic_dt");
    check(frame.mu, nt, "mu");
    check(frame.q_norm, nt, "q_norm");
    check(frame.r_mass, nt, "r_mass");

    auto out = open_for_write(path);
    out << "# vtk DataFile Version 3.0\nhmc snapshot\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << nv << " double\n";
    for (int v = 0; v < nv; ++v) out << mesh.vertex(v).x() << ' ' << mesh.vertex(v).y() << " 0\n";
    out << "CELLS " << nt << ' ' << 4 * nt << '\n';
    for (int t = 0; t < nt; ++t) {
        const auto& c = mesh.cell(t);
        out << "3 " << c[0] << ' ' << c[1] << ' ' << c[2] << '\n';
    }
    out << "CELL_TYPES " << nt << '\n';
    for (int t = 0; t < nt; ++t) out << "5\n";

    if (frame.u.size() || frame.c.size()) {
        out << "POINT_DATA " << nv << '\n';
        if (frame.u.size()) {
            out << "VECTORS u double\n";
            for (int v = 0; v < nv; ++v) out << frame.u(2 * v) << ' ' << frame.u(2 * v + 1) << " 0\n";
        }
        if (frame.c.size()) scalar_block(out, "c_cg", frame.c.head(nv));
    }
    out << "CELL_DATA " << nt << '\n';
    if (frame.c.size()) scalar_block(out, "c_enrichment", frame.c.tail(nt));
    if (frame.p.size()) scalar_block(out, "p", frame.p);
    if (frame.phi.size()) scalar_block(out, "phi", frame.phi);
    if (frame.dphic_dt.size()) scalar_block(out, "dphic_dt", frame.dphic_dt);
    if (frame.mu.size()) scalar_block(out, "mu", frame.mu);
    if (frame.q_norm.size()) scalar_block(out, "q_norm", frame.q_norm);
    if (frame.r_mass.size()) scalar_block(out, "r_mass", frame.r_mass);
    out.flush();
    if (!out) throw IoError("write failed: " + path.string());
}

std::map<std::string, std::vector<double>> read_vtk_cell_data(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::map<std::string, std::vector<double>> out;
    std::string word;
    int ncell = -1;
    while (in >> word) {
        if (word == "CELL_DATA") {
            in >> ncell;
        } else if (word == "SCALARS" && ncell >= 0) {
            std::string name, type, lookup, table;
            int comps = 1;
            in >> name >> type >> comps >> lookup >> table;
            auto& v = out[name];
            v.resize(ncell);
            for (int i = 0; i < ncell; ++i)
                if (!(in >> v[i])) throw IoError("truncated cell array " + name + " in " + path.string());
        }
    }
    return out;
}

TimeSeriesWriter::TimeSeriesWriter(const std::filesystem::path& path) : out_(open_for_write(path)) {
    out_ << "step,t,dt,fs_iterations,dphi_final,max_abs_r_mass,injected_volume\n";
    out_.flush();
}

void TimeSeriesWriter::append(const StepRecord& r) {
    out_ << r.step << ',' << r.t << ',' << r.dt << ',' << r.fs_iterations << ',' << r.dphi_final << ','
         << r.max_abs_r_mass << ',' << r.injected_volume << '\n';
    out_.flush();
    if (!out_) throw IoError("time series write failed");
}

void write_timeseries(const std::vector<StepRecord>& records, const std::filesystem::path& path) {
    TimeSeriesWriter w(path);
    for (const auto& r : records) w.append(r);
}

} // namespace hmc
