#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/LU>

namespace hmc {

using Point = Eigen::Vector2d;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Split direction of each rectangle in a structured box mesh.
enum class DiagonalPattern { right, left, crossed };

/// Walls of the rectangular domain, numbered like the physical boundaries
/// 1 (left), 2 (top), 3 (right), 4 (bottom).
enum class Wall : std::uint8_t { left = 0, top = 1, right = 2, bottom = 3 };

inline constexpr std::array<Wall, 4> all_walls{Wall::left, Wall::top, Wall::right, Wall::bottom};

std::string to_string(Wall w);
Wall wall_from_string(const std::string& name);

struct FacetGeometry {
    Vec2 normal_plus;                   ///< unit normal, outward from T+
    double measure = 0.0;               ///< facet length
    double h_e = 0.0;                   ///< characteristic length
    std::array<double, 2> cell_measures{0.0, 0.0};  ///< areas of T+ and T- (0 on the boundary)
    bool interior = false;
};

/// Conforming triangulation of a planar domain.
///
/// Cells are stored counter-clockwise. Local facet i of a cell is the edge
/// opposite local vertex i. Facets are stored as (low, high) vertex pairs;
/// facet_cells(f)[0] is T+, the adjacent cell with the lower index, and
/// facet_cells(f)[1] is T- or -1 on the boundary. Immutable after construction.
class Mesh {
public:
    Mesh() = default;

    /// Builds connectivity. Clockwise cells are reoriented; degenerate,
    /// duplicate and non-manifold configurations throw TopologyError.
    Mesh(std::vector<Point> vertices, std::vector<std::array<int, 3>> cells);

    int num_vertices() const { return static_cast<int>(vertices_.size()); }
    int num_cells() const { return static_cast<int>(cells_.size()); }
    int num_facets() const { return static_cast<int>(facets_.size()); }

    const Point& vertex(int v) const { return vertices_[v]; }
    const std::array<int, 3>& cell(int t) const { return cells_[t]; }
    const std::array<int, 2>& facet(int f) const { return facets_[f]; }
    const std::array<int, 3>& cell_facets(int t) const { return cell_facets_[t]; }
    const std::array<int, 2>& facet_cells(int f) const { return facet_cells_[f]; }
    bool is_boundary(int f) const { return facet_cells_[f][1] < 0; }

    const std::vector<Point>& vertices() const { return vertices_; }
    const std::vector<std::array<int, 3>>& cells() const { return cells_; }

    double cell_area(int t) const { return areas_[t]; }
    double cell_diameter(int t) const;
    Point centroid(int t) const;
    double facet_length(int f) const;
    Point facet_midpoint(int f) const;

    /// Global facet normal: the low-to-high tangent rotated clockwise.
    Vec2 facet_normal(int f) const;
    /// Outward unit normal of local facet `local` of cell t.
    Vec2 outward_normal(int t, int local) const;
    /// +1 if the global facet normal points out of cell t, -1 otherwise.
    double facet_sign(int t, int local) const;
    /// Local index (0..2) of facet f within cell t, or -1.
    int local_facet_index(int t, int f) const;

    FacetGeometry facet_geometry(int f) const;

    double h_min() const;
    double h_max() const;

    /// Two vertex indices of local facet i of cell t, in counter-clockwise order.
    std::array<int, 2> local_facet_vertices(int t, int local) const;

private:
    std::vector<Point> vertices_;
    std::vector<std::array<int, 3>> cells_;
    std::vector<std::array<int, 2>> facets_;
    std::vector<std::array<int, 3>> cell_facets_;
    std::vector<std::array<int, 2>> facet_cells_;
    std::vector<double> areas_;
};

Mesh build_rectangle_mesh(double length, double height, int nx, int ny,
                          DiagonalPattern pattern = DiagonalPattern::right);

/// Reads the triangle-list ASCII format: `NV NT`, NV lines `x y`, NT lines
/// `i j k` (0-based). `#` starts a comment.
Mesh import_mesh(const std::filesystem::path& path);
void export_mesh(const Mesh& mesh, const std::filesystem::path& path);

struct FacetPartition {
    std::vector<int> interior;
    std::vector<int> boundary;
};

FacetPartition classify_facets(const Mesh& mesh);

/// Wall label of every boundary facet of a mesh covering [0, length] x [0, height].
class BoundaryTags {
public:
    BoundaryTags() = default;
    explicit BoundaryTags(std::vector<std::int8_t> labels) : labels_(std::move(labels)) {}

    bool has_wall(int f) const { return labels_[f] >= 0; }
    Wall wall(int f) const { return static_cast<Wall>(labels_[f]); }
    std::vector<int> facets_on(Wall w) const;
    int size() const { return static_cast<int>(labels_.size()); }

private:
    std::vector<std::int8_t> labels_;  // -1 on interior facets
};

BoundaryTags tag_boundaries(const Mesh& mesh, double length, double height);

} // namespace hmc
