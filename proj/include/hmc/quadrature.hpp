#pragma once

#include <vector>

#include <Eigen/Core>

namespace hmc {

/// Symmetric rule on the reference triangle (0,0), (1,0), (0,1); weights sum to 1/2.
struct TriangleRule {
    std::vector<Eigen::Vector2d> points;
    std::vector<double> weights;
    int degree = 0;
};

/// Gauss-Legendre rule on [0, 1]; weights sum to 1.
struct EdgeRule {
    std::vector<double> points;
    std::vector<double> weights;
    int degree = 0;
};

/// Smallest built-in rule exact to at least `degree` (supported up to 5).
const TriangleRule& triangle_rule(int degree);
/// Smallest Gauss rule exact to at least `degree` (supported up to 7).
const EdgeRule& edge_rule(int degree);

inline constexpr int cell_quadrature_degree = 4;
inline constexpr int facet_quadrature_degree = 3;

} // namespace hmc
