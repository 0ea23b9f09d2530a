#include "hmc/randfield.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include <Eigen/Cholesky>

#include "hmc/errors.hpp"

namespace hmc {

Eigen::VectorXd generate_log_perm_field(const RandomFieldSpec& spec, const Mesh& mesh) {
    if (!(spec.variance >= 0)) throw InvalidArgument("random field variance must be non-negative");
    if (!(spec.lx > 0 && spec.ly > 0)) throw InvalidArgument("correlation lengths must be positive");
    if (!(spec.mean > 0)) throw InvalidArgument("random field mean must be positive");
    const int n = mesh.num_cells();
    if (spec.variance == 0.0) return Eigen::VectorXd::Constant(n, spec.mean);

    Eigen::MatrixXd cov(n, n);
    std::vector<Point> c(n);
    for (int t = 0; t < n; ++t) c[t] = mesh.centroid(t);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) {
            const double v = spec.variance * std::exp(-std::abs(c[i].x() - c[j].x()) / spec.lx -
                                                      std::abs(c[i].y() - c[j].y()) / spec.ly);
            cov(i, j) = cov(j, i) = v;
        }

    Eigen::LLT<Eigen::MatrixXd> llt;
    double jitter = 0.0;
    for (int attempt = 0; attempt < 6; ++attempt) {
        Eigen::MatrixXd m = cov;
        m.diagonal().array() += jitter;
        llt.compute(m);
        if (llt.info() == Eigen::Success) break;
        jitter = jitter == 0.0 ? 1e-12 * spec.variance : jitter * 100.0;
        if (attempt == 5) throw SolverError("covariance factorization failed after jitter retries");
    }

    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd z(n);
    for (int i = 0; i < n; ++i) z(i) = normal(rng);
    const Eigen::VectorXd y = llt.matrixL() * z;
    Eigen::VectorXd k = y.array().exp();
    k *= spec.mean / k.mean();
    return k;
}

FieldRange field_range_report(const Eigen::VectorXd& field) {
    if (field.size() == 0) throw InvalidArgument("field range of an empty field");
    FieldRange r;
    r.min = field.minCoeff();
    r.max = field.maxCoeff();
    r.decades = std::log10(r.max / r.min);
    return r;
}

void export_cell_field(const Eigen::VectorXd& field, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << "cell,k\n" << std::setprecision(17);
    for (Eigen::Index i = 0; i < field.size(); ++i) out << i << ',' << field(i) << '\n';
}

Eigen::VectorXd import_cell_field(const std::filesystem::path& path, int expected_cells) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    Eigen::VectorXd out = Eigen::VectorXd::Constant(expected_cells, std::nan(""));
    std::string line;
    int lineno = 0, count = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1 && line.rfind("cell", 0) == 0) continue;
        if (line.empty()) continue;
        std::istringstream ls(line);
        int idx;
        char comma;
        double v;
        if (!(ls >> idx >> comma >> v) || comma != ',') throw ParseError("expected `cell,value`", lineno);
        if (idx < 0 || idx >= expected_cells) throw ParseError("cell index out of range", lineno);
        if (!(v > 0)) throw ParseError("permeability must be positive", lineno);
        out(idx) = v;
        ++count;
    }
    if (count != expected_cells || out.hasNaN())
        throw ParseError(path.string() + ": expected " + std::to_string(expected_cells) + " cells, got " +
                             std::to_string(count),
                         0);
    return out;
}

} // namespace hmc
