#pragma once

#include <array>
#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "hmc/mesh.hpp"

namespace hmc {

enum class SpaceKind { cg1, cg2_vector, dg0, eg1, bdm1 };

const char* to_string(SpaceKind k);

/// Number of local basis functions per cell.
int local_dimension(SpaceKind k);
/// 1 for scalar spaces, 2 for vector-valued ones.
int value_dimension(SpaceKind k);

enum class EntityKind { vertex, facet, cell };

struct DofEntity {
    EntityKind kind;
    int index;
};

/// Cell-to-global degree of freedom map.
///
/// Local orderings: CG1 [v0 v1 v2]; CG2-vector 2*node+component over nodes
/// [v0 v1 v2 f0 f1 f2] with f_i the facet opposite v_i; DG0 [t];
/// EG1 [v0 v1 v2 | t] with the enrichment block stored after all vertices;
/// BDM1 [2f0 2f0+1 2f1 2f1+1 2f2 2f2+1] (0th then 1st normal moment).
class DofMap {
public:
    DofMap() = default;
    DofMap(SpaceKind kind, int size, int local_dim, std::vector<int> cell_dofs,
           std::vector<DofEntity> entities)
        : kind_(kind), size_(size), local_dim_(local_dim), cell_dofs_(std::move(cell_dofs)),
          entities_(std::move(entities)) {}

    SpaceKind kind() const { return kind_; }
    int size() const { return size_; }
    int local_dimension() const { return local_dim_; }
    int num_cells() const { return local_dim_ ? static_cast<int>(cell_dofs_.size()) / local_dim_ : 0; }
    std::vector<int> cell_dofs(int t) const {
        return {cell_dofs_.begin() + t * local_dim_, cell_dofs_.begin() + (t + 1) * local_dim_};
    }
    const DofEntity& entity(int dof) const { return entities_[dof]; }

private:
    SpaceKind kind_ = SpaceKind::dg0;
    int size_ = 0;
    int local_dim_ = 0;
    std::vector<int> cell_dofs_;
    std::vector<DofEntity> entities_;
};

DofMap build_dofmap(const Mesh& mesh, SpaceKind kind);

/// Closed-form global dimension from mesh counts.
int expected_dofs(SpaceKind kind, int num_vertices, int num_facets, int num_cells);

struct BasisValues {
    Eigen::MatrixXd values;     ///< n x value_dim
    Eigen::MatrixXd gradients;  ///< scalar spaces: n x 2; vector spaces: n x 4 (d v_x/dx, d v_x/dy, d v_y/dx, d v_y/dy)
    Eigen::VectorXd divergence; ///< vector spaces only
};

/// Reference-element basis at a point of the reference triangle (0,0), (1,0), (0,1).
/// BDM1 uses the vertex numbering as the global facet orientation.
BasisValues eval_basis(SpaceKind kind, const Eigen::Vector2d& ref_point);

/// Affine map of a cell: x = origin + jacobian * xi.
struct CellMap {
    Point origin;
    Mat2 jacobian;
    Mat2 inverse_t;   ///< J^{-T}
    double det = 0.0;

    CellMap() = default;
    CellMap(const Mesh& mesh, int t);
    Point to_physical(const Eigen::Vector2d& xi) const { return origin + jacobian * xi; }
    Eigen::Vector2d to_reference(const Point& x) const;
};

/// Barycentric coordinates (lambda_0, lambda_1, lambda_2) of a reference point.
inline Eigen::Vector3d barycentric(const Eigen::Vector2d& xi) {
    return {1.0 - xi.x() - xi.y(), xi.x(), xi.y()};
}

/// Physical gradients of the three hat functions of cell t (rows).
Eigen::Matrix<double, 3, 2> hat_gradients(const CellMap& map);

/// Quadratic Lagrange basis (6 scalars) and physical gradients at a reference point.
void p2_basis(const CellMap& map, const Eigen::Vector2d& xi, Eigen::Matrix<double, 6, 1>& values,
              Eigen::Matrix<double, 6, 2>& grads);

/// BDM1 basis of one physical cell, dual to the global facet moments.
class Bdm1Cell {
public:
    Bdm1Cell() = default;
    Bdm1Cell(const Mesh& mesh, int t);
    /// Triangle given directly; facet orientation taken from vertex ids.
    Bdm1Cell(const std::array<Point, 3>& verts, const std::array<int, 3>& ids);

    /// 6 x 2 basis values at a physical point.
    Eigen::Matrix<double, 6, 2> values(const Point& x) const;
    /// Constant divergence of each basis function.
    const Eigen::Matrix<double, 6, 1>& divergence() const { return div_; }

private:
    void build(const std::array<Point, 3>& verts, const std::array<int, 3>& ids);

    Point center_;
    double scale_ = 1.0;
    Eigen::Matrix<double, 6, 6> coeff_;  // monomial coefficients, one column per basis function
    Eigen::Matrix<double, 6, 1> div_;
};

/// Per-cell BDM1 tables for a whole mesh.
class Bdm1Space {
public:
    explicit Bdm1Space(const Mesh& mesh);
    const Bdm1Cell& cell(int t) const { return cells_[t]; }
    const DofMap& dofmap() const { return dofs_; }

    /// Value of a BDM1 field at a physical point of cell t.
    Vec2 evaluate(const Eigen::VectorXd& coeffs, int t, const Point& x) const;
    /// Cellwise (constant) divergence of a BDM1 field.
    double divergence(const Eigen::VectorXd& coeffs, int t) const;
    /// Mean of the field over cell t.
    Vec2 cell_average(const Eigen::VectorXd& coeffs, int t) const;

private:
    const Mesh* mesh_;
    DofMap dofs_;
    std::vector<Bdm1Cell> cells_;
};

using VectorField = std::function<Vec2(const Point&)>;
using ScalarField = std::function<double(const Point&)>;

/// Facet moments of `field` against the global facet normals.
Eigen::VectorXd bdm1_interpolate(const Mesh& mesh, const VectorField& field);

/// Normal-moment pair (0th, 1st) of a function along facet f with the global orientation.
std::array<double, 2> facet_moments(const Mesh& mesh, int f, const VectorField& field);

/// Splits an EG1 vector [CG1 | DG0] into its two blocks.
std::pair<Eigen::VectorXd, Eigen::VectorXd> eg_split(const Mesh& mesh, const Eigen::VectorXd& coeffs);
Eigen::VectorXd eg_combine(const Eigen::VectorXd& cg_part, const Eigen::VectorXd& dg_part);

/// EG1 field value at a reference point of cell t.
double eg_evaluate(const Mesh& mesh, const Eigen::VectorXd& coeffs, int t, const Eigen::Vector2d& xi);
/// Cell mean of an EG1 field.
double eg_cell_average(const Mesh& mesh, const Eigen::VectorXd& coeffs, int t);

} // namespace hmc
