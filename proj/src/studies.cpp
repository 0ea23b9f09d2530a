#include "hmc/studies.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "hmc/driver.hpp"
#include "hmc/errors.hpp"
#include "hmc/poroelastic.hpp"
#include "hmc/quadrature.hpp"
#include "hmc/transport.hpp"

namespace hmc {

namespace {

constexpr double pi = std::numbers::pi;

void fill_orders(std::vector<ConvergenceRow>& rows) {
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double r = std::log(rows[i - 1].h / rows[i].h);
        rows[i].order = std::log(rows[i - 1].error / rows[i].error) / r;
        if (rows[i].error2 > 0 && rows[i - 1].error2 > 0)
            rows[i].order2 = std::log(rows[i - 1].error2 / rows[i].error2) / r;
    }
}

WallBCs all_walls_pressure() {
    WallBCs bcs;
    for (auto& b : bcs) {
        b.mechanics = MechanicsBC::free;
        b.flow = FlowBC::pressure;
    }
    return bcs;
}

} // namespace

std::vector<ConvergenceRow> darcy_mms(const std::vector<int>& levels) {
    auto p_exact = [](const Point& x) { return std::cos(pi * x.x()) * std::cos(pi * x.y()); };
    auto q_exact = [](const Point& x) {
        return Vec2(pi * std::sin(pi * x.x()) * std::cos(pi * x.y()), pi * std::cos(pi * x.x()) * std::sin(pi * x.y()));
    };
    std::vector<ConvergenceRow> rows;
    for (int n : levels) {
        const Mesh mesh = build_rectangle_mesh(1.0, 1.0, n, n, DiagonalPattern::right);
        const BoundaryTags tags = tag_boundaries(mesh, 1.0, 1.0);
        const FlowProblem flow(mesh, tags, all_walls_pressure());
        const int nt = mesh.num_cells();
        FlowInputs in;
        in.permeability.assign(nt, Mat2::Identity());
        in.viscosity = Eigen::VectorXd::Ones(nt);
        in.storage = Eigen::VectorXd::Zero(nt);
        in.p_prev = Eigen::VectorXd::Zero(nt);
        in.rate_source = Eigen::VectorXd::Zero(nt);
        in.g = Eigen::VectorXd::Zero(nt);
        in.dt = 1.0;
        in.g_field = [&](const Point& x) { return 2.0 * pi * pi * p_exact(x); };
        in.p_boundary = p_exact;
        const FlowSolution sol = flow.solve(in);

        const TriangleRule& rule = triangle_rule(5);
        double eq = 0.0, ep = 0.0;
        for (int t = 0; t < nt; ++t) {
            CellMap map(mesh, t);
            for (std::size_t k = 0; k < rule.points.size(); ++k) {
                const Point x = map.to_physical(rule.points[k]);
                const double w = rule.weights[k] * std::abs(map.det);
                eq += w * (flow.space().evaluate(sol.q, t, x) - q_exact(x)).squaredNorm();
                ep += w * std::pow(sol.p(t) - p_exact(x), 2);
            }
        }
        rows.push_back({n, 1.0 / n, std::sqrt(eq), std::sqrt(ep)});
    }
    fill_orders(rows);
    return rows;
}

std::vector<ConvergenceRow> transport_mms(const std::vector<int>& levels) {
    const double D = 1.0, phi = 1.0, dt = 1.0;
    auto c_exact = [](const Point& x) { return std::cos(pi * x.x()) * std::cos(pi * x.y()); };
    std::vector<ConvergenceRow> rows;
    for (int n : levels) {
        const Mesh mesh = build_rectangle_mesh(1.0, 1.0, n, n, DiagonalPattern::right);
        const BoundaryTags tags = tag_boundaries(mesh, 1.0, 1.0);
        const Bdm1Space space(mesh);
        const TransportProblem tp(mesh, tags);
        const int nt = mesh.num_cells();
        HistoryRing<Eigen::VectorXd> history(4);
        history.push(Eigen::VectorXd::Zero(tp.dofmap().size()));
        TransportInputs in;
        in.space = &space;
        in.q = Eigen::VectorXd::Zero(space.dofmap().size());
        in.phi = Eigen::VectorXd::Constant(nt, phi);
        in.diffusivity.assign(nt, D * Mat2::Identity());
        in.reaction = Eigen::VectorXd::Zero(nt);
        in.history = &history;
        in.bdf_order = 1;
        in.dt = dt;
        in.source = [&](const Point& x) { return (phi / dt + 2.0 * pi * pi * D) * c_exact(x); };
        const Eigen::VectorXd c = tp.solve(in);

        const TriangleRule& rule = triangle_rule(5);
        double ec = 0.0;
        for (int t = 0; t < nt; ++t) {
            CellMap map(mesh, t);
            for (std::size_t k = 0; k < rule.points.size(); ++k) {
                const double w = rule.weights[k] * std::abs(map.det);
                ec += w * std::pow(eg_evaluate(mesh, c, t, rule.points[k]) - c_exact(map.to_physical(rule.points[k])), 2);
            }
        }
        rows.push_back({n, 1.0 / n, std::sqrt(ec), 0.0});
    }
    fill_orders(rows);
    return rows;
}

std::string format_convergence(const std::string& title, const std::vector<ConvergenceRow>& rows, const char* first,
                               const char* second) {
    std::ostringstream os;
    os << title << '\n' << std::setw(6) << "n" << std::setw(14) << "h" << std::setw(14) << first << std::setw(8)
       << "order";
    if (second) os << std::setw(14) << second << std::setw(8) << "order";
    os << '\n';
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        os << std::setw(6) << r.n << std::setw(14) << std::setprecision(4) << std::scientific << r.h << std::setw(14)
           << r.error << std::fixed << std::setprecision(3) << std::setw(8);
        if (i)
            os << r.order;
        else
            os << "-";
        if (second) {
            os << std::setw(14) << std::scientific << std::setprecision(4) << r.error2 << std::fixed
               << std::setprecision(3) << std::setw(8);
            if (i)
                os << r.order2;
            else
                os << "-";
        }
        os << '\n';
    }
    return os.str();
}

double terzaghi_pressure(double p0, double z, double H, double Tv, int terms) {
    double p = 0.0;
    for (int m = 0; m < terms; ++m) {
        const double M = (2 * m + 1) * pi / 2.0;
        p += 2.0 * p0 / M * std::sin(M * z / H) * std::exp(-M * M * Tv);
    }
    return p;
}

TerzaghiResult terzaghi_study(const std::vector<double>& Tv) {
    SimulationConfig cfg = preset_config("terzaghi");
    const MaterialParams& m = cfg.material;
    const auto [lambda, shear] = lame_constants(m.K, m.nu);
    const double mv = 1.0 / (lambda + 2.0 * shear);
    const double S = biot_modulus_inverse(m.phi0, m.cf, m.alpha, m.Ks()) + m.alpha * m.alpha * mv;
    TerzaghiResult res;
    res.H = cfg.mesh.height;
    res.cv = m.k0(1, 1) / (m.viscosity.value_or(1.0) * S);
    res.p0 = cfg.p0;
    const double load = -cfg.bc[static_cast<int>(Wall::top)].traction.y();
    if (std::abs(undrained_pressure(m, load) - res.p0) > 1e-9 * res.p0)
        throw ConfigError("terzaghi preset: initial pressure is not the undrained response");

    double t_last = 0.0;
    for (double tv : Tv) t_last = std::max(t_last, tv * res.H * res.H / res.cv);
    cfg.time.t_end = t_last + 2.0 * cfg.time.dt_max;
    cfg.output.vtk = cfg.output.csv = false;

    Simulation sim(cfg);
    const Mesh& mesh = sim.mesh();
    const int nt = mesh.num_cells();
    const TriangleRule& rule = triangle_rule(4);
    Eigen::VectorXd p_before = sim.state().p;
    double t_before = 0.0;
    std::vector<bool> done(Tv.size(), false);
    while (!sim.finished()) {
        sim.advance();
        const double t_now = sim.state().t;
        for (std::size_t i = 0; i < Tv.size(); ++i) {
            const double target = Tv[i] * res.H * res.H / res.cv;
            if (done[i] || t_now < target) continue;
            // linear interpolation between the two bracketing steps
            const double w = (target - t_before) / (t_now - t_before);
            const Eigen::VectorXd p = (1.0 - w) * p_before + w * sim.state().p;
            double num = 0.0, den = 0.0;
            for (int t = 0; t < nt; ++t) {
                CellMap map(mesh, t);
                for (std::size_t k = 0; k < rule.points.size(); ++k) {
                    const Point x = map.to_physical(rule.points[k]);
                    const double wq = rule.weights[k] * std::abs(map.det);
                    const double pe = terzaghi_pressure(res.p0, res.H - x.y(), res.H, Tv[i]);
                    num += wq * std::pow(p(t) - pe, 2);
                    den += wq * pe * pe;
                }
            }
            res.checks.push_back({Tv[i], target, std::sqrt(num / den)});
            done[i] = true;
        }
        p_before = sim.state().p;
        t_before = t_now;
    }
    for (std::size_t i = 0; i < Tv.size(); ++i)
        if (!done[i]) throw StateError("terzaghi study ended before Tv = " + std::to_string(Tv[i]));
    return res;
}

MassResidualField steady_flow_residual(int nx, int ny) {
    const double L = 100.0, H = 30.0;
    const Mesh mesh = build_rectangle_mesh(L, H, nx, ny, DiagonalPattern::crossed);
    const BoundaryTags tags = tag_boundaries(mesh, L, H);
    WallBCs bcs;
    for (auto& b : bcs) b.flow = FlowBC::flux;
    bcs[static_cast<int>(Wall::left)].flux = 2e-4;
    bcs[static_cast<int>(Wall::right)].flow = FlowBC::pressure;
    bcs[static_cast<int>(Wall::right)].pressure = 1e5;
    const FlowProblem flow(mesh, tags, bcs);
    const int nt = mesh.num_cells();
    FlowInputs in;
    in.permeability.assign(nt, 8.8e-10 * Mat2::Identity());
    in.viscosity = Eigen::VectorXd::Constant(nt, 1e-4);
    in.storage = Eigen::VectorXd::Zero(nt);
    in.p_prev = Eigen::VectorXd::Zero(nt);
    in.rate_source = Eigen::VectorXd::Zero(nt);
    in.g = Eigen::VectorXd::Zero(nt);
    in.dt = 1.0;
    const FlowSolution sol = flow.solve(in);

    MassBalanceInputs mb;
    mb.storage = in.storage;
    mb.p = sol.p;
    mb.p_prev = in.p_prev;
    mb.sigma = mb.sigma_prev = Eigen::VectorXd::Zero(nt);
    mb.phi_c = mb.phi_c_prev = Eigen::VectorXd::Zero(nt);
    mb.g = in.g;
    mb.q = sol.q;
    mb.alpha = 0.0;
    mb.K = 1.0;
    mb.dt = 1.0;
    return local_mass_residual(mesh, tags, bcs, mb);
}

double front_y_variance(const Mesh& mesh, const Eigen::VectorXd& c_eg, double c_res, double c_in, double height,
                        int bands) {
    if (bands < 2) throw InvalidArgument("front_y_variance needs at least two bands");
    if (c_res == c_in) throw InvalidArgument("front_y_variance: resident and injected concentrations coincide");
    const double band_h = height / bands;
    Eigen::VectorXd invaded = Eigen::VectorXd::Zero(bands);
    for (int t = 0; t < mesh.num_cells(); ++t) {
        const int b = std::clamp(static_cast<int>(mesh.centroid(t).y() / band_h), 0, bands - 1);
        const double w = std::clamp((eg_cell_average(mesh, c_eg, t) - c_res) / (c_in - c_res), 0.0, 1.0);
        invaded(b) += w * mesh.cell_area(t) / band_h;
    }
    const double mean = invaded.mean();
    return (invaded.array() - mean).square().sum() / bands;
}

} // namespace hmc
