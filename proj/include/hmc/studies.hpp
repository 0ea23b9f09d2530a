#pragma once

#include <string>
#include <vector>

#include "hmc/config.hpp"
#include "hmc/diagnostics.hpp"
#include "hmc/mesh.hpp"

namespace hmc {

struct ConvergenceRow {
    int n = 0;             ///< cells per side
    double h = 0.0;
    double error = 0.0;    ///< primary field L2 error
    double error2 = 0.0;   ///< secondary field L2 error (pressure for Darcy)
    double order = 0.0, order2 = 0.0;   ///< observed orders against the previous row
};

/// Mixed Darcy on the unit square with p = cos(pi x) cos(pi y), k = I, mu = 1,
/// pressure data on every wall. error = |q - q_h|, error2 = |p - p_h|.
std::vector<ConvergenceRow> darcy_mms(const std::vector<int>& levels = {4, 8, 16, 32});

/// One implicit Euler step of the EG transport operator without flow,
/// exact solution c = cos(pi x) cos(pi y) with zero normal derivative.
std::vector<ConvergenceRow> transport_mms(const std::vector<int>& levels = {4, 8, 16, 32});

std::string format_convergence(const std::string& title, const std::vector<ConvergenceRow>& rows,
                               const char* first = "err", const char* second = nullptr);

/// Excess pore pressure of the drained-top column, 50-term series.
/// z is the distance from the drained boundary, H the drainage length, Tv = cv t / H^2.
double terzaghi_pressure(double p0, double z, double H, double Tv, int terms = 50);

struct TerzaghiCheck {
    double Tv = 0.0, t = 0.0;
    double rel_l2 = 0.0;
};

struct TerzaghiResult {
    double cv = 0.0, p0 = 0.0, H = 0.0;
    std::vector<TerzaghiCheck> checks;
};

/// Runs the column preset and compares cell pressures at each Tv.
TerzaghiResult terzaghi_study(const std::vector<double>& Tv = {0.1, 0.3, 0.6});

/// Cell residual of one steady flow solve: left flux, right pressure, no storage or coupling.
MassResidualField steady_flow_residual(int nx = 40, int ny = 12);

/// Variance over horizontal bands of the invaded length, where each cell counts
/// with the fraction of the way its mean concentration has moved from `c_res` toward `c_in`.
double front_y_variance(const Mesh& mesh, const Eigen::VectorXd& c_eg, double c_res, double c_in, double height,
                        int bands);

} // namespace hmc
