#include "hmc/driver.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "hmc/errors.hpp"
#include "hmc/log.hpp"
#include "hmc/randfield.hpp"

namespace hmc {

namespace {

double max_relative_gap(const Eigen::VectorXd& phi_m, const Eigen::VectorXd& phi_f) {
    double d = 0.0;
    for (Eigen::Index t = 0; t < phi_m.size(); ++t) d = std::max(d, std::abs(phi_m(t) - phi_f(t)) / std::abs(phi_m(t)));
    return d;
}

template <class F>
auto staged(int step, const char* stage, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const StageError&) {
        throw;
    } catch (const NonconvergenceError& e) {
        throw NonconvergenceError("step " + std::to_string(step) + ", stage " + stage + ": " + e.what(), e.history());
    } catch (const std::exception& e) {
        throw StageError(step, stage, e.what());
    }
}

} // namespace

Mesh build_mesh(const MeshConfig& cfg) {
    if (!cfg.file.empty()) return import_mesh(cfg.file);
    return build_rectangle_mesh(cfg.length, cfg.height, cfg.nx, cfg.ny, cfg.pattern);
}

Simulation::Simulation(const SimulationConfig& config) : config_(config) {
    config_.validate();
    mesh_ = build_mesh(config_.mesh);
    double length = config_.mesh.length, height = config_.mesh.height;
    if (!config_.mesh.file.empty()) {
        length = height = 0.0;
        for (const auto& v : mesh_.vertices()) {
            length = std::max(length, v.x());
            height = std::max(height, v.y());
        }
    }
    tags_ = tag_boundaries(mesh_, length, height);

    const MaterialParams& m = config_.material;
    std::tie(lambda_, shear_) = lame_constants(m.K, m.nu);
    try {
        momentum_ = std::make_unique<MomentumProblem>(mesh_, tags_, config_.bc, lambda_, shear_);
    } catch (const SolverError& e) {
        throw ConfigError(std::string("mechanics boundary conditions: ") + e.what());
    }
    flow_ = std::make_unique<FlowProblem>(mesh_, tags_, config_.bc);
    if (config_.transport) transport_ = std::make_unique<TransportProblem>(mesh_, tags_);

    const int nt = mesh_.num_cells();
    k_base_.assign(nt, m.k0);
    if (config_.randfield.enabled) {
        const Eigen::VectorXd k = config_.randfield.file.empty()
                                      ? generate_log_perm_field(config_.randfield.spec, mesh_)
                                      : import_cell_field(config_.randfield.file, nt);
        for (int t = 0; t < nt; ++t) k_base_[t] = k(t) * Mat2::Identity();
    }
    for (int t = 0; t < nt; ++t) {
        const double y = mesh_.centroid(t).y();
        for (const auto& l : config_.layers)
            if (y >= l.ymin && y <= l.ymax) {
                k_base_[t] = l.k;
                break;
            }
    }
    storage_ = Eigen::VectorXd::Constant(nt, storage_coefficient(m));
    initialize();
}

Simulation::~Simulation() = default;

Eigen::VectorXd Simulation::cell_average(const Eigen::VectorXd& c_eg) const {
    Eigen::VectorXd out(mesh_.num_cells());
    for (int t = 0; t < mesh_.num_cells(); ++t) out(t) = eg_cell_average(mesh_, c_eg, t);
    return out;
}

Eigen::VectorXd Simulation::viscosity_from(const Eigen::VectorXd& c_eg) const {
    const MaterialParams& m = config_.material;
    const int nt = mesh_.num_cells();
    if (m.viscosity || c_eg.size() == 0) return Eigen::VectorXd::Constant(nt, m.viscosity.value_or(m.mu_l));
    const Eigen::VectorXd cbar = cell_average(c_eg);
    Eigen::VectorXd mu(nt);
    for (int t = 0; t < nt; ++t) mu(t) = viscosity_of_c(cbar(t), m.c_l, m.c_h, m.mu_l, m.mu_h);
    return mu;
}

std::vector<Mat2> Simulation::permeability() const {
    std::vector<Mat2> k(k_base_.size());
    for (std::size_t t = 0; t < k.size(); ++t) k[t] = state_.k_mult(t) * k_base_[t];
    return k;
}

void Simulation::initialize() {
    const MaterialParams& m = config_.material;
    const int nt = mesh_.num_cells(), nv = mesh_.num_vertices();
    SimulationState& s = state_;
    s = SimulationState{};
    s.p = Eigen::VectorXd::Constant(nt, config_.p0);
    s.u = momentum_->solve(s.p, m.alpha, m.f);
    s.eps_v0 = momentum_->volumetric_strain(s.u);
    s.eps_v = s.eps_v0;
    s.sigma = volumetric_stress(s.eps_v, s.p, m.K, m.alpha);
    s.q = Eigen::VectorXd::Zero(flow_->num_velocity_dofs());
    s.phi_m = Eigen::VectorXd::Constant(nt, m.phi0);
    s.phi_f = s.phi_m;
    s.phi_c = Eigen::VectorXd::Zero(nt);
    s.phi_c_hat = s.phi_c;
    s.dphic_dt = Eigen::VectorXd::Zero(nt);
    s.phi = s.phi_m + s.phi_c;
    s.k_mult.resize(nt);
    s.A_s.resize(nt);
    s.D_e.resize(nt);
    for (int t = 0; t < nt; ++t) {
        s.k_mult(t) = perm_multiplier(s.phi(t), m.phi0, m.b);
        s.A_s(t) = specific_surface(m.A0, s.phi(t), m.phi0);
        s.D_e[t] = effective_diffusion(m.D, s.phi(t));
    }
    if (config_.transport) {
        const double c0 = config_.c0.value_or(model_ceq(config_.p0, m));
        s.c = Eigen::VectorXd::Zero(nv + nt);
        s.c.head(nv).setConstant(c0);
        s.c_prev = s.c;
        s.c_hat = s.c;
        s.c_history.push(s.c);
    }
    s.mu = viscosity_from(s.c_hat);
    s.dt = std::min({config_.time.dt0, config_.time.dt_max, config_.time.t_end});
    s.dt_prev = 0.0;
    s.step = 0;
    s.t = 0.0;
    pending_ = false;
}

FixedStressReport Simulation::fixed_stress_loop() {
    const MaterialParams& m = config_.material;
    const int nt = mesh_.num_cells();
    SimulationState& s = state_;
    const double dt = s.dt;

    FlowInputs in;
    in.viscosity = s.mu;
    in.storage = storage_;
    in.p_prev = s.p;
    in.g = Eigen::VectorXd::Constant(nt, m.g);
    in.dt = dt;

    const Eigen::VectorXd sigma_prev = s.sigma;
    const Eigen::VectorXd p_prev = s.p;
    const Eigen::VectorXd phi_c_prev = s.phi_c;
    const Eigen::VectorXd chem_rate = (s.phi_c_hat - s.phi_c) / dt;

    Eigen::VectorXd sigma_iter = sigma_prev;   // sigma^{iota-1}
    Eigen::VectorXd p_iter = p_prev;           // p^{iota-1}
    Eigen::VectorXd phi_m_iter = s.phi_m;      // phi_m^{iota-1}
    Eigen::VectorXd sigma_used;

    FixedStressReport report;
    Eigen::VectorXd phi_f(nt), phi_m(nt);
    for (int it = 1;; ++it) {
        in.permeability = permeability();
        in.rate_source = fixed_stress_source(sigma_iter, sigma_prev, dt, m.alpha, m.K) + chem_rate;
        const FlowSolution sol = flow_->solve(in);
        sigma_used = sigma_iter;

        for (int t = 0; t < nt; ++t) phi_f(t) = porosity_flow(phi_m_iter(t), m.alpha, m.K, sol.p(t), p_iter(t));

        const Eigen::VectorXd u = momentum_->solve(sol.p, m.alpha, m.f);
        const Eigen::VectorXd eps_v = momentum_->volumetric_strain(u);
        for (int t = 0; t < nt; ++t)
            phi_m(t) = porosity_mech(m.phi0, m.alpha, eps_v(t), s.eps_v0(t), sol.p(t), config_.p0, m.K);
        sigma_iter = volumetric_stress(eps_v, sol.p, m.K, m.alpha);

        const double dphi = max_relative_gap(phi_m, phi_f);
        report.history.push_back(dphi);
        report.iterations = it;
        report.dphi_final = dphi;

        for (int t = 0; t < nt; ++t) s.k_mult(t) = perm_multiplier(phi_m(t) + s.phi_c_hat(t), m.phi0, m.b);
        p_iter = sol.p;
        phi_m_iter = phi_m;

        s.q = sol.q;
        s.p = sol.p;
        s.u = u;
        s.eps_v = eps_v;
        if (dphi < config_.solver.tol) break;
        if (it >= config_.solver.max_iterations) {
            std::ostringstream os;
            os << "fixed-stress iteration did not converge in " << it << " iterations; dphi history:";
            for (double d : report.history) os << ' ' << d;
            throw NonconvergenceError(os.str(), report.history);
        }
    }
    s.sigma = sigma_iter;
    s.phi_m = phi_m;
    s.phi_f = phi_f;

    // audit the system that was actually solved last
    MassBalanceInputs mb;
    mb.storage = storage_;
    mb.p = s.p;
    mb.p_prev = p_prev;
    mb.sigma = sigma_used;
    mb.sigma_prev = sigma_prev;
    mb.phi_c = s.phi_c_hat;
    mb.phi_c_prev = phi_c_prev;
    mb.g = in.g;
    mb.q = s.q;
    mb.alpha = m.alpha;
    mb.K = m.K;
    mb.dt = dt;
    s.last_residual = local_mass_residual(mesh_, tags_, config_.bc, mb);
    s.last_telescoping = telescoping_defect(s.last_residual);
    s.last_fixed_stress = report;

    pending_ = true;
    pending_dt_ = dt;
    return report;
}

void Simulation::chemistry_step() {
    if (!pending_) throw StateError("chemistry_step needs a converged fixed-stress loop first");
    const MaterialParams& m = config_.material;
    const int nt = mesh_.num_cells();
    SimulationState& s = state_;
    const double dt = pending_dt_;

    // properties at t^n with the predicted chemical porosity
    s.phi_c = s.phi_c_hat;
    for (int t = 0; t < nt; ++t) {
        s.phi(t) = clamp_porosity(s.phi_m(t) + s.phi_c(t));
        s.A_s(t) = specific_surface(m.A0, s.phi(t), m.phi0);
        s.D_e[t] = effective_diffusion(m.D, s.phi(t));
    }

    const StepController controller(config_.time.cfl, config_.time.dt_max, mesh_.h_min());
    double dt_next = controller.next(max_velocity_norm(mesh_, flow_->space(), s.q));
    // land the last step on t_end
    const double remaining = config_.time.t_end - (s.t + dt);
    if (remaining > 0.0) dt_next = std::min(dt_next, remaining);

    if (transport_) {
        const Eigen::VectorXd c_hat_cell = cell_average(s.c_hat);
        TransportInputs ti;
        ti.space = &flow_->space();
        ti.q = s.q;
        ti.phi = s.phi;
        const auto qc = cell_velocities(mesh_, flow_->space(), s.q);
        ti.diffusivity.resize(nt);
        for (int t = 0; t < nt; ++t)
            ti.diffusivity[t] = stabilized_diffusion(s.D_e[t], qc[t], mesh_.cell_diameter(t), config_.solver.gamma);
        ti.reaction = reaction_source(c_hat_cell, s.p, s.A_s, s.phi, dt, m);
        ti.history = &s.c_history;
        ti.bdf_order = std::min<int>(config_.solver.bdf_order, static_cast<int>(s.c_history.size()));
        ti.dt = dt;
        for (Wall w : all_walls) ti.c_in[static_cast<int>(w)] = config_.bc[static_cast<int>(w)].c_in;
        ti.theta = config_.solver.theta;
        ti.beta = config_.solver.beta;
        const Eigen::VectorXd c_new = transport_->solve(ti);

        s.c_prev = s.c;
        s.c = c_new;
        s.c_history.push(c_new);
        s.c_hat = extrapolate(s.c, s.c_prev, dt_next, dt, s.step + 1);

        // chemical porosity at t^{n+1}: RK4 of the dissolution rate with c
        // interpolated between c^n and c_hat^{n+1} and p frozen at p^n
        const Eigen::VectorXd c_now = cell_average(s.c);
        const Eigen::VectorXd c_next = cell_average(s.c_hat);
        const Eigen::VectorXd phi_m = s.phi_m;
        const Eigen::VectorXd p = s.p;
        std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)> gamma =
            [&](double tau, const Eigen::VectorXd& phic) {
                const double w = tau / dt_next;
                Eigen::VectorXd rate(nt);
                for (int t = 0; t < nt; ++t) {
                    const double c = (1.0 - w) * c_now(t) + w * c_next(t);
                    const double phi = std::clamp(phi_m(t) + phic(t), phi_min, phi_max);
                    const double As = specific_surface(m.A0, phi, m.phi0);
                    const double ceq = model_ceq(p(t), m);
                    double r = reaction_rate_ceq(c, ceq, m.temp, m.table) * As;
                    if (m.reaction_cap) {
                        const double lim = phi * std::abs(ceq - c) / dt_next;
                        r = std::clamp(r, -lim, lim);
                    }
                    rate(t) = porosity_chem_rate(r, 1.0, m.rho_s, m.omega);
                }
                return rate;
            };
        s.phi_c_hat = rk_integrate<Eigen::VectorXd>(4, gamma, s.phi_c, 0.0, dt_next);
        s.dphic_dt = (s.phi_c_hat - s.phi_c) / dt_next;
    }

    s.mu = viscosity_from(s.c_hat);
    for (int t = 0; t < nt; ++t) s.k_mult(t) = perm_multiplier(s.phi_m(t) + s.phi_c_hat(t), m.phi0, m.b);

    s.step += 1;
    s.t += dt;
    s.dt_prev = dt;
    s.dt = dt_next;
    pending_ = false;
}

StepInfo Simulation::advance() {
    const int n = state_.step + 1;
    StepInfo info;
    info.fixed_stress = staged(n, "fixed-stress", [&] { return fixed_stress_loop(); });
    staged(n, "chemistry", [&] {
        chemistry_step();
        return 0;
    });
    info.telescoping = state_.last_telescoping;
    StepRecord& r = info.record;
    r.step = state_.step;
    r.t = state_.t;
    r.dt = state_.dt_prev;
    r.fs_iterations = info.fixed_stress.iterations;
    r.dphi_final = info.fixed_stress.dphi_final;
    r.max_abs_r_mass = state_.last_residual.max_abs;
    r.injected_volume = injection_rate() * state_.t;
    return info;
}

double Simulation::injection_rate() const {
    double rate = 0.0;
    for (Wall w : all_walls) {
        const WallBC& b = config_.bc[static_cast<int>(w)];
        if (b.flow != FlowBC::flux || !(b.flux > 0)) continue;
        for (int f : tags_.facets_on(w)) rate += b.flux * mesh_.facet_length(f);
    }
    return rate;
}

bool Simulation::finished() const {
    return state_.step >= config_.time.max_steps || state_.t >= config_.time.t_end * (1.0 - 1e-12);
}

VtkFrame Simulation::frame() const {
    const SimulationState& s = state_;
    VtkFrame f;
    f.u = s.u;
    f.c = s.c;
    f.p = s.p;
    f.phi = s.phi;
    f.dphic_dt = s.dphic_dt;
    f.mu = s.mu;
    const auto qc = cell_velocities(mesh_, flow_->space(), s.q);
    f.q_norm.resize(mesh_.num_cells());
    for (int t = 0; t < mesh_.num_cells(); ++t) f.q_norm(t) = qc[t].norm();
    f.r_mass = s.last_residual.r.size() ? s.last_residual.r : Eigen::VectorXd::Zero(mesh_.num_cells());
    return f;
}

RunSummary run_simulation(const SimulationConfig& config, const RunOptions& options) {
    Simulation sim(config);
    const auto& out = config.output;
    const std::filesystem::path dir = out.dir;
    const bool files = options.write_files;
    std::unique_ptr<TimeSeriesWriter> csv;
    if (files && out.csv) csv = std::make_unique<TimeSeriesWriter>(dir / "timeseries.csv");
    auto snapshot = [&](int step) {
        if (!files || !out.vtk || out.cadence <= 0 || step % out.cadence != 0) return;
        std::ostringstream name;
        name << "fields_" << std::setw(5) << std::setfill('0') << step << ".vtk";
        write_vtk(sim.mesh(), sim.frame(), dir / name.str());
    };
    snapshot(0);

    RunSummary summary;
    const int cap = options.max_steps.value_or(config.time.max_steps);
    while (!sim.finished() && sim.state().step < cap) {
        const StepInfo info = sim.advance();
        const int n = info.record.step;
        if (n == 1)
            summary.first_step_iterations = info.fixed_stress.iterations;
        else
            summary.max_later_iterations = std::max(summary.max_later_iterations, info.fixed_stress.iterations);
        summary.max_r_mass = std::max(summary.max_r_mass, info.record.max_abs_r_mass);
        summary.max_telescoping = std::max(summary.max_telescoping, info.telescoping);
        summary.records.push_back(info.record);
        if (csv) csv->append(info.record);
        snapshot(n);
        if (options.on_step) options.on_step(sim, info);
        std::ostringstream os;
        os << "step " << n << "  t=" << info.record.t << "  dt=" << info.record.dt
           << "  fs_it=" << info.fixed_stress.iterations << "  max|r|=" << info.record.max_abs_r_mass;
        log_info(os.str());
    }
    summary.steps = sim.state().step;
    summary.t = sim.state().t;
    return summary;
}

} // namespace hmc
