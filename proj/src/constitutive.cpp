#include "hmc/constitutive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hmc/errors.hpp"
#include "hmc/log.hpp"

namespace hmc {

ReactionTable default_reaction_table() {
    ReactionTable t;
    t.rows[0] = {-5.73, 1.25e-2, 1.38, 2.61e-5, -4.01e-3, 3.26e-1};
    t.rows[1] = {-6.45, 2.09e-2, -4.65e-2, 3.06e-5, 9.25e-3, -4.59e-1};
    t.rows[2] = {-5.80, 1.35e-2, 9.97e-1, 3.80e-5, 1.51e-5, -4.87e-4};
    return t;
}

int reaction_row(double ctilde) {
    if (ctilde > 0.01) return 0;
    if (ctilde <= -0.01) return 1;
    return 2;
}

double MaterialParams::Ks() const {
    if (alpha >= 1.0) return std::numeric_limits<double>::infinity();
    return K / (1.0 - alpha);
}

void MaterialParams::validate() const {
    auto fail = [](const std::string& key, const std::string& why) { throw ConfigError(key + ": " + why); };
    if (!(K > 0)) fail("K", "must be positive");
    if (!(nu > -1.0 && nu < 0.5)) fail("nu", "must lie in (-1, 0.5)");
    if (!(alpha >= 0.0 && alpha <= 1.0)) fail("alpha", "must lie in [0, 1]");
    if (!(phi0 > 0.0 && phi0 < 1.0)) fail("phi0", "must lie in (0, 1)");
    if (!(k0(0, 0) > 0 && k0.determinant() > 0 && std::abs(k0(0, 1) - k0(1, 0)) <= 1e-12 * k0.norm()))
        fail("k", "must be symmetric positive definite");
    if (!(cf >= 0)) fail("cf", "must be non-negative");
    if (!(mu_l > 0 && mu_h > mu_l)) fail("mu_l/mu_h", "need 0 < mu_l < mu_h");
    if (!(c_h > c_l)) fail("c_l/c_h", "need c_l < c_h");
    if (viscosity && !(*viscosity > 0)) fail("viscosity", "must be positive");
    if (!(rho_s > 0)) fail("rho_s", "must be positive");
    if (!(omega > 0)) fail("omega", "must be positive");
    if (!(A0 >= 0)) fail("A0", "must be non-negative");
    if (!(ceq_scale > 0)) fail("ceq_scale", "must be positive");
    if (!(D(0, 0) >= 0 && D.determinant() >= 0)) fail("D", "must be positive semi-definite");
}

double biot_alpha(double K, double Ks) {
    if (!(Ks > 0)) throw InvalidArgument("biot_alpha: K_s must be positive");
    if (K > Ks) throw InvalidArgument("biot_alpha: K exceeds K_s");
    return 1.0 - K / Ks;
}

std::pair<double, double> lame_constants(double K, double nu) {
    if (!(K > 0)) throw InvalidArgument("lame_constants: K must be positive");
    if (!(nu > -1.0 && nu < 0.5)) throw InvalidArgument("lame_constants: nu out of (-1, 0.5)");
    return {3.0 * K * nu / (1.0 + nu), 3.0 * K * (1.0 - 2.0 * nu) / (2.0 * (1.0 + nu))};
}

double biot_modulus_inverse(double phi0, double cf, double alpha, double Ks) {
    return phi0 * cf + (alpha - phi0) / Ks;
}

double storage_coefficient(const MaterialParams& m) {
    return biot_modulus_inverse(m.phi0, m.cf, m.alpha, m.Ks()) + m.alpha * m.alpha / m.K;
}

double equilibrium_concentration(double p, double tau) {
    return 1.417e-3 + 3.823e-6 * p - 4.313e-7 * tau - 2.148e-8 * p * p + 4.304e-8 * p * tau - 7.117e-8 * tau * tau;
}

double reaction_rate_ceq(double c, double ceq, double temp, const ReactionTable& table) {
    if (ceq == 0.0) throw StateError("reaction_rate: equilibrium concentration is zero");
    const double ct = (ceq - c) / ceq;
    if (ct == 0.0) return 0.0;
    const auto& a = table.rows[reaction_row(ct)];
    const double l = std::log10(std::abs(ct));
    const double r = a[0] + a[1] * temp + a[2] * l + a[3] * temp * temp + a[4] * temp * l + a[5] * l * l;
    return ct > 0.0 ? std::pow(10.0, r) : -std::pow(10.0, r);
}

double reaction_rate(double c, double p_mpa, double temp, const ReactionTable& table) {
    return reaction_rate_ceq(c, equilibrium_concentration(p_mpa, temp), temp, table);
}

double clamp_porosity(double phi) {
    if (phi < phi_min || phi > phi_max || !std::isfinite(phi)) {
        std::ostringstream os;
        os << "porosity " << phi << " clamped to [" << phi_min << ", " << phi_max << "]";
        log_warning(os.str());
        if (!std::isfinite(phi)) return phi_min;
        return std::clamp(phi, phi_min, phi_max);
    }
    return phi;
}

double porosity_mech(double phi0, double alpha, double eps_v, double eps_v0, double p, double p0, double K) {
    return clamp_porosity(phi0 + (alpha - phi0) * (eps_v - eps_v0) + (alpha - phi0) * (1.0 - alpha) * (p - p0) / K);
}

double porosity_flow(double phi_prev, double alpha, double K, double p_iter, double p_prev) {
    return clamp_porosity(phi_prev + (alpha - phi_prev) * (p_iter - p_prev) / K);
}

double porosity_chem_rate(double rate, double A_s, double rho_s, double omega) {
    return rate * A_s / (rho_s * omega);
}

double specific_surface(double A0, double phi, double phi0) {
    if (!(phi > 0 && phi < 1 && phi0 > 0 && phi0 < 1)) throw DomainError("specific_surface: porosity outside (0, 1)");
    return A0 * (phi / phi0) * std::log(phi) / std::log(phi0);
}

double perm_multiplier(double phi, double phi0, double b) {
    if (!(phi0 > 0)) throw InvalidArgument("perm_multiplier: phi0 must be positive");
    return std::exp(b * (phi / phi0 - 1.0));
}

double viscosity_of_c(double c, double c_l, double c_h, double mu_l, double mu_h) {
    if (!(mu_l > 0 && mu_h > 0)) throw InvalidArgument("viscosity bounds must be positive");
    const double s = std::clamp((c - c_l) / (c_h - c_l), 0.0, 1.0);
    if (s == 0.0) return mu_l;
    if (s == 1.0) return mu_h;
    return std::exp(std::log(mu_l) + s * (std::log(mu_h) - std::log(mu_l)));
}

Mat2 effective_diffusion(const Mat2& D, double phi) {
    if (!(phi > 0)) throw DomainError("effective_diffusion: porosity must be positive");
    // tortuosity phi^{-1/2}, so D_e = phi / tau * D
    return std::pow(phi, 1.5) * D;
}

} // namespace hmc
