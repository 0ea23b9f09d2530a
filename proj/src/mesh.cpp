#include "hmc/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "hmc/errors.hpp"

namespace hmc {

std::string to_string(Wall w) {
    switch (w) {
    case Wall::left: return "left";
    case Wall::top: return "top";
    case Wall::right: return "right";
    case Wall::bottom: return "bottom";
    }
    return "?";
}

Wall wall_from_string(const std::string& name) {
    for (Wall w : all_walls)
        if (to_string(w) == name) return w;
    throw InvalidArgument("unknown wall '" + name + "'");
}

namespace {

double signed_area(const Point& a, const Point& b, const Point& c) {
    return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

} // namespace

Mesh::Mesh(std::vector<Point> vertices, std::vector<std::array<int, 3>> cells)
    : vertices_(std::move(vertices)), cells_(std::move(cells)) {
    const int nv = num_vertices();
    areas_.resize(cells_.size());
    std::set<std::array<int, 3>> seen;
    for (std::size_t t = 0; t < cells_.size(); ++t) {
        auto& c = cells_[t];
        for (int v : c)
            if (v < 0 || v >= nv)
                throw TopologyError("cell " + std::to_string(t) + " references vertex " +
                                    std::to_string(v) + " out of range");
        if (c[0] == c[1] || c[1] == c[2] || c[0] == c[2])
            throw TopologyError("cell " + std::to_string(t) + " repeats a vertex");
        auto key = c;
        std::sort(key.begin(), key.end());
        if (!seen.insert(key).second)
            throw TopologyError("duplicate cell " + std::to_string(t));
        double a = signed_area(vertices_[c[0]], vertices_[c[1]], vertices_[c[2]]);
        if (a < 0.0) {
            std::swap(c[1], c[2]);
            a = -a;
        }
        if (a == 0.0) throw TopologyError("cell " + std::to_string(t) + " has zero area");
        areas_[t] = a;
    }

    std::map<std::pair<int, int>, int> facet_index;
    cell_facets_.resize(cells_.size());
    for (int t = 0; t < num_cells(); ++t) {
        for (int i = 0; i < 3; ++i) {
            int a = cells_[t][(i + 1) % 3];
            int b = cells_[t][(i + 2) % 3];
            auto key = std::minmax(a, b);
            auto [it, inserted] = facet_index.try_emplace({key.first, key.second}, num_facets());
            if (inserted) {
                facets_.push_back({key.first, key.second});
                facet_cells_.push_back({t, -1});
            } else {
                auto& fc = facet_cells_[it->second];
                if (fc[1] >= 0)
                    throw TopologyError("facet (" + std::to_string(key.first) + ", " +
                                        std::to_string(key.second) +
                                        ") is shared by more than two cells");
                fc[1] = t;  // cells are visited in increasing order, so fc[0] < t
            }
            cell_facets_[t][i] = it->second;
        }
    }

    std::vector<char> used(nv, 0);
    for (const auto& c : cells_)
        for (int v : c) used[v] = 1;
    for (int v = 0; v < nv; ++v)
        if (!used[v]) throw TopologyError("vertex " + std::to_string(v) + " belongs to no cell");

    // Hanging vertices show up as a boundary vertex strictly inside another boundary facet.
    std::vector<int> bverts;
    for (int f = 0; f < num_facets(); ++f)
        if (is_boundary(f)) {
            bverts.push_back(facets_[f][0]);
            bverts.push_back(facets_[f][1]);
        }
    std::sort(bverts.begin(), bverts.end());
    bverts.erase(std::unique(bverts.begin(), bverts.end()), bverts.end());
    for (int f = 0; f < num_facets(); ++f) {
        if (!is_boundary(f)) continue;
        const Point& a = vertices_[facets_[f][0]];
        const Point& b = vertices_[facets_[f][1]];
        const Vec2 d = b - a;
        const double len2 = d.squaredNorm();
        for (int v : bverts) {
            if (v == facets_[f][0] || v == facets_[f][1]) continue;
            const Vec2 w = vertices_[v] - a;
            const double s = w.dot(d) / len2;
            if (s <= 1e-12 || s >= 1.0 - 1e-12) continue;
            const double cross = d.x() * w.y() - d.y() * w.x();
            if (std::abs(cross) <= 1e-12 * len2)
                throw TopologyError("non-conforming mesh: vertex " + std::to_string(v) +
                                    " lies inside facet (" + std::to_string(facets_[f][0]) + ", " +
                                    std::to_string(facets_[f][1]) + ")");
        }
    }
}

double Mesh::cell_diameter(int t) const {
    const auto& c = cells_[t];
    double d = 0.0;
    for (int i = 0; i < 3; ++i)
        d = std::max(d, (vertices_[c[i]] - vertices_[c[(i + 1) % 3]]).norm());
    return d;
}

Point Mesh::centroid(int t) const {
    const auto& c = cells_[t];
    return (vertices_[c[0]] + vertices_[c[1]] + vertices_[c[2]]) / 3.0;
}

double Mesh::facet_length(int f) const {
    return (vertices_[facets_[f][1]] - vertices_[facets_[f][0]]).norm();
}

Point Mesh::facet_midpoint(int f) const {
    return 0.5 * (vertices_[facets_[f][0]] + vertices_[facets_[f][1]]);
}

Vec2 Mesh::facet_normal(int f) const {
    const Vec2 t = (vertices_[facets_[f][1]] - vertices_[facets_[f][0]]).normalized();
    return {t.y(), -t.x()};
}

std::array<int, 2> Mesh::local_facet_vertices(int t, int local) const {
    return {cells_[t][(local + 1) % 3], cells_[t][(local + 2) % 3]};
}

Vec2 Mesh::outward_normal(int t, int local) const {
    auto [a, b] = local_facet_vertices(t, local);
    const Vec2 d = (vertices_[b] - vertices_[a]).normalized();
    return {d.y(), -d.x()};
}

double Mesh::facet_sign(int t, int local) const {
    // counter-clockwise cells traverse a facet low->high exactly when the
    // global normal is outward
    auto [a, b] = local_facet_vertices(t, local);
    return a < b ? 1.0 : -1.0;
}

int Mesh::local_facet_index(int t, int f) const {
    for (int i = 0; i < 3; ++i)
        if (cell_facets_[t][i] == f) return i;
    return -1;
}

FacetGeometry Mesh::facet_geometry(int f) const {
    if (f < 0 || f >= num_facets()) throw InvalidArgument("facet index out of range");
    FacetGeometry g;
    const auto& fc = facet_cells_[f];
    g.measure = facet_length(f);
    g.normal_plus = outward_normal(fc[0], local_facet_index(fc[0], f));
    g.cell_measures[0] = areas_[fc[0]];
    g.interior = fc[1] >= 0;
    if (g.interior) {
        g.cell_measures[1] = areas_[fc[1]];
        g.h_e = (g.cell_measures[0] + g.cell_measures[1]) / (2.0 * g.measure);
    } else {
        g.h_e = g.cell_measures[0] / g.measure;
    }
    return g;
}

double Mesh::h_min() const {
    double h = std::numeric_limits<double>::infinity();
    for (int t = 0; t < num_cells(); ++t) h = std::min(h, cell_diameter(t));
    return h;
}

double Mesh::h_max() const {
    double h = 0.0;
    for (int t = 0; t < num_cells(); ++t) h = std::max(h, cell_diameter(t));
    return h;
}

Mesh build_rectangle_mesh(double length, double height, int nx, int ny, DiagonalPattern pattern) {
    if (!(length > 0.0) || !(height > 0.0))
        throw InvalidArgument("rectangle dimensions must be positive");
    if (nx < 1 || ny < 1) throw InvalidArgument("nx and ny must be at least 1");

    std::vector<Point> verts;
    verts.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1));
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i)
            verts.emplace_back(length * i / nx, height * j / ny);

    auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
    std::vector<std::array<int, 3>> cells;
    cells.reserve(2 * static_cast<std::size_t>(nx) * ny);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int v00 = id(i, j), v10 = id(i + 1, j), v01 = id(i, j + 1), v11 = id(i + 1, j + 1);
            bool rising = pattern == DiagonalPattern::right ||
                          (pattern == DiagonalPattern::crossed && (i + j) % 2 == 0);
            if (rising) {
                cells.push_back({v00, v10, v11});
                cells.push_back({v00, v11, v01});
            } else {
                cells.push_back({v00, v10, v01});
                cells.push_back({v10, v11, v01});
            }
        }
    }
    return Mesh(std::move(verts), std::move(cells));
}

namespace {

struct LineReader {
    std::ifstream in;
    int line_no = 0;

    // Next non-empty line with comments stripped; false at end of file.
    bool next(std::string& out) {
        std::string raw;
        while (std::getline(in, raw)) {
            ++line_no;
            if (auto pos = raw.find('#'); pos != std::string::npos) raw.erase(pos);
            if (raw.find_first_not_of(" \t\r") == std::string::npos) continue;
            out = raw;
            return true;
        }
        return false;
    }
};

template <typename T, std::size_t N>
std::array<T, N> parse_fields(const std::string& line, int line_no) {
    std::istringstream ss(line);
    std::array<T, N> out{};
    for (auto& x : out)
        if (!(ss >> x)) throw ParseError("expected " + std::to_string(N) + " values", line_no);
    std::string extra;
    if (ss >> extra) throw ParseError("unexpected trailing token '" + extra + "'", line_no);
    return out;
}

} // namespace

Mesh import_mesh(const std::filesystem::path& path) {
    LineReader r;
    r.in.open(path);
    if (!r.in) throw IoError("cannot open mesh file '" + path.string() + "'");
    std::string line;
    if (!r.next(line)) throw ParseError("missing header 'NV NT'", r.line_no);
    auto header = parse_fields<long, 2>(line, r.line_no);
    if (header[0] < 3 || header[1] < 1)
        throw ParseError("header requires NV >= 3 and NT >= 1", r.line_no);

    std::vector<Point> verts;
    verts.reserve(header[0]);
    for (long i = 0; i < header[0]; ++i) {
        if (!r.next(line)) throw ParseError("unexpected end of file in vertex list", r.line_no);
        auto xy = parse_fields<double, 2>(line, r.line_no);
        verts.emplace_back(xy[0], xy[1]);
    }
    std::vector<std::array<int, 3>> cells;
    cells.reserve(header[1]);
    for (long i = 0; i < header[1]; ++i) {
        if (!r.next(line)) throw ParseError("unexpected end of file in cell list", r.line_no);
        auto c = parse_fields<long, 3>(line, r.line_no);
        for (long v : c)
            if (v < 0 || v >= header[0])
                throw ParseError("vertex index " + std::to_string(v) + " out of range", r.line_no);
        cells.push_back({static_cast<int>(c[0]), static_cast<int>(c[1]), static_cast<int>(c[2])});
    }
    if (r.next(line)) throw ParseError("trailing content after cell list", r.line_no);
    return Mesh(std::move(verts), std::move(cells));
}

void export_mesh(const Mesh& mesh, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write mesh file '" + path.string() + "'");
    out << std::setprecision(17);
    out << mesh.num_vertices() << ' ' << mesh.num_cells() << '\n';
    for (const auto& v : mesh.vertices()) out << v.x() << ' ' << v.y() << '\n';
    for (const auto& c : mesh.cells()) out << c[0] << ' ' << c[1] << ' ' << c[2] << '\n';
    if (!out) throw IoError("failed writing mesh file '" + path.string() + "'");
}

FacetPartition classify_facets(const Mesh& mesh) {
    FacetPartition p;
    for (int f = 0; f < mesh.num_facets(); ++f) {
        const auto& fc = mesh.facet_cells(f);
        if (fc[0] < 0) throw TopologyError("facet " + std::to_string(f) + " has no adjacent cell");
        (fc[1] >= 0 ? p.interior : p.boundary).push_back(f);
    }
    return p;
}

std::vector<int> BoundaryTags::facets_on(Wall w) const {
    std::vector<int> out;
    for (int f = 0; f < size(); ++f)
        if (labels_[f] == static_cast<std::int8_t>(w)) out.push_back(f);
    return out;
}

BoundaryTags tag_boundaries(const Mesh& mesh, double length, double height) {
    const double tol = 1e-10 * std::max({1.0, length, height});
    std::vector<std::int8_t> labels(mesh.num_facets(), -1);
    for (int f = 0; f < mesh.num_facets(); ++f) {
        if (!mesh.is_boundary(f)) continue;
        const Point& a = mesh.vertex(mesh.facet(f)[0]);
        const Point& b = mesh.vertex(mesh.facet(f)[1]);
        auto on = [tol](double x, double y, double target) {
            return std::abs(x - target) <= tol && std::abs(y - target) <= tol;
        };
        if (on(a.x(), b.x(), 0.0)) labels[f] = static_cast<std::int8_t>(Wall::left);
        else if (on(a.y(), b.y(), height)) labels[f] = static_cast<std::int8_t>(Wall::top);
        else if (on(a.x(), b.x(), length)) labels[f] = static_cast<std::int8_t>(Wall::right);
        else if (on(a.y(), b.y(), 0.0)) labels[f] = static_cast<std::int8_t>(Wall::bottom);
        else
            throw TaggingError("boundary facet " + std::to_string(f) + " lies on no wall of the " +
                               std::to_string(length) + " x " + std::to_string(height) + " box");
    }
    return BoundaryTags(std::move(labels));
}

} // namespace hmc
