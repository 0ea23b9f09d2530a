#pragma once

#include <array>
#include <optional>
#include <utility>

#include "hmc/mesh.hpp"

namespace hmc {

/// Coefficients a0..a5 of the calcite rate exponent, one row per saturation range.
struct ReactionTable {
    // 0: c~ > 0.01, 1: c~ <= -0.01, 2: -0.01 < c~ <= 0.01
    std::array<std::array<double, 6>, 3> rows;
};

ReactionTable default_reaction_table();

/// Row of the table used for relative undersaturation `ctilde`.
int reaction_row(double ctilde);

struct MaterialParams {
    // rock
    double K = 8.4e9;
    double nu = 0.18;
    double alpha = 0.74;
    double phi0 = 0.2;
    Mat2 k0 = 8.8e-10 * Mat2::Identity();
    double b = 22.2;
    double rho_s = 2500.0;
    double omega = 10.0;
    double A0 = 5000.0;
    // fluid
    double cf = 1e-10;
    double rho = 1000.0;
    Mat2 D = 1e-12 * Mat2::Identity();
    double mu_l = 1e-4;
    double mu_h = 5.0;
    double c_l = 0.0;
    double c_h = 1.68;
    std::optional<double> viscosity;  // constant viscosity overrides the mixing law
    // chemistry
    double temp = 20.0;
    double ceq_scale = 1000.0;
    bool reaction_cap = true;
    ReactionTable table = default_reaction_table();
    // sources
    double g = 0.0;
    Vec2 f = Vec2::Zero();

    double Ks() const;
    void validate() const;
};

inline constexpr double phi_min = 1e-4;
inline constexpr double phi_max = 0.999;

double biot_alpha(double K, double Ks);
/// (lambda, shear modulus) from bulk modulus and Poisson ratio.
std::pair<double, double> lame_constants(double K, double nu);
double biot_modulus_inverse(double phi0, double cf, double alpha, double Ks);
/// 1/M + alpha^2/K.
double storage_coefficient(const MaterialParams& m);

/// Calcite solubility; pressure in MPa, temperature in degrees C.
double equilibrium_concentration(double p_mpa, double temp);
inline double pa_to_mpa(double p) { return p * 1e-6; }

/// Signed rate with relative undersaturation taken against `ceq`.
double reaction_rate_ceq(double c, double ceq, double temp, const ReactionTable& table = default_reaction_table());
/// Signed rate with ceq from the solubility polynomial.
double reaction_rate(double c, double p_mpa, double temp, const ReactionTable& table = default_reaction_table());

/// Clamps into [phi_min, phi_max], warning when it has to.
double clamp_porosity(double phi);

double porosity_mech(double phi0, double alpha, double eps_v, double eps_v0, double p, double p0, double K);
double porosity_flow(double phi_prev, double alpha, double K, double p_iter, double p_prev);
double porosity_chem_rate(double rate, double A_s, double rho_s, double omega);
double specific_surface(double A0, double phi, double phi0);
double perm_multiplier(double phi, double phi0, double b);
double viscosity_of_c(double c, double c_l, double c_h, double mu_l, double mu_h);
Mat2 effective_diffusion(const Mat2& D, double phi);

} // namespace hmc
