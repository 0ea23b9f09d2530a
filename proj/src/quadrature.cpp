#include "hmc/quadrature.hpp"

#include <cmath>

#include "hmc/errors.hpp"

namespace hmc {

namespace {

void add_orbit3(TriangleRule& r, double a, double w) {
    const double b = 1.0 - 2.0 * a;
    r.points.emplace_back(a, a);
    r.points.emplace_back(b, a);
    r.points.emplace_back(a, b);
    r.weights.insert(r.weights.end(), 3, w);
}

TriangleRule make_centroid() {
    TriangleRule r;
    r.points.emplace_back(1.0 / 3.0, 1.0 / 3.0);
    r.weights.push_back(0.5);
    r.degree = 1;
    return r;
}

TriangleRule make_deg2() {
    TriangleRule r;
    add_orbit3(r, 1.0 / 6.0, 1.0 / 6.0);
    r.degree = 2;
    return r;
}

// Dunavant degree 4, six points
TriangleRule make_deg4() {
    TriangleRule r;
    add_orbit3(r, 0.445948490915964886318329253883, 0.5 * 0.223381589678011465944640403259);
    add_orbit3(r, 0.091576213509770743459571463402, 0.5 * 0.109951743655321867388693329389);
    r.degree = 4;
    return r;
}

// Radon degree 5, seven points
TriangleRule make_deg5() {
    TriangleRule r;
    const double s15 = std::sqrt(15.0);
    r.points.emplace_back(1.0 / 3.0, 1.0 / 3.0);
    r.weights.push_back(9.0 / 80.0);
    add_orbit3(r, (6.0 - s15) / 21.0, (155.0 - s15) / 2400.0);
    add_orbit3(r, (6.0 + s15) / 21.0, (155.0 + s15) / 2400.0);
    r.degree = 5;
    return r;
}

EdgeRule make_gauss(int n) {
    EdgeRule r;
    std::vector<double> x, w;
    switch (n) {
    case 1: x = {0.0}; w = {2.0}; break;
    case 2: x = {-1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0)}; w = {1.0, 1.0}; break;
    case 3: x = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)}; w = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0}; break;
    default: {
        const double a = std::sqrt(3.0 / 7.0 - 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
        const double b = std::sqrt(3.0 / 7.0 + 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
        const double wa = (18.0 + std::sqrt(30.0)) / 36.0;
        const double wb = (18.0 - std::sqrt(30.0)) / 36.0;
        x = {-b, -a, a, b};
        w = {wb, wa, wa, wb};
    }
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        r.points.push_back(0.5 * (x[i] + 1.0));
        r.weights.push_back(0.5 * w[i]);
    }
    r.degree = 2 * static_cast<int>(x.size()) - 1;
    return r;
}

} // namespace

const TriangleRule& triangle_rule(int degree) {
    static const TriangleRule r1 = make_centroid(), r2 = make_deg2(), r4 = make_deg4(),
                              r5 = make_deg5();
    if (degree <= 1) return r1;
    if (degree == 2) return r2;
    if (degree <= 4) return r4;
    if (degree == 5) return r5;
    throw InvalidArgument("no triangle rule of degree " + std::to_string(degree));
}

const EdgeRule& edge_rule(int degree) {
    static const EdgeRule g1 = make_gauss(1), g2 = make_gauss(2), g3 = make_gauss(3),
                          g4 = make_gauss(4);
    if (degree <= 1) return g1;
    if (degree <= 3) return g2;
    if (degree <= 5) return g3;
    if (degree <= 7) return g4;
    throw InvalidArgument("no edge rule of degree " + std::to_string(degree));
}

} // namespace hmc
