#pragma once

#include <array>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "degell/fields.hpp"
#include "degell/mesh.hpp"
#include "degell/problem.hpp"

namespace degell {

struct QuadratureNode {
  Point x;
  double weight;
  /// Values of the cell's local P1 basis functions at x (barycentric coordinates).
  std::array<double, 3> basis;
};

/// Piecewise-linear space on a mesh. Neumann spaces carry one dof per vertex;
/// Dirichlet spaces constrain every boundary vertex to zero.
///
/// Cheap to copy: the underlying data is shared and immutable.
class DiscreteSpace {
 public:
  DiscreteSpace(Mesh mesh, BoundaryKind bc);

  [[nodiscard]] const Mesh& mesh() const noexcept { return data_->mesh; }
  [[nodiscard]] BoundaryKind bc() const noexcept { return data_->bc; }
  [[nodiscard]] int dimension() const noexcept { return data_->mesh.dimension(); }
  [[nodiscard]] int dof_count() const noexcept { return data_->dof_count; }

  /// Dof index of a vertex, or -1 when the vertex is constrained.
  [[nodiscard]] int dof(std::size_t vertex) const { return data_->dof_of_vertex[vertex]; }
  [[nodiscard]] int vertex_of_dof(int dof) const { return data_->vertex_of_dof[static_cast<std::size_t>(dof)]; }

  [[nodiscard]] int nodes_per_cell() const noexcept { return 3; }
  [[nodiscard]] std::span<const QuadratureNode> quadrature(std::size_t cell) const;
  /// Constant gradient of local basis function `local` on `cell`.
  [[nodiscard]] const SmallVector& basis_gradient(std::size_t cell, int local) const;

  /// All quadrature points, cell-major.
  [[nodiscard]] std::vector<Point> quadrature_points() const;

  /// Expands dof coefficients to vertex values (constrained vertices get 0).
  [[nodiscard]] Eigen::VectorXd to_vertex_values(const Eigen::VectorXd& coeffs) const;
  /// Restricts vertex values to the unconstrained dofs.
  [[nodiscard]] Eigen::VectorXd restrict_to_dofs(const Eigen::VectorXd& vertex_values) const;

  /// Gradient of the interpolant of vertex values on one cell.
  [[nodiscard]] SmallVector cell_gradient(std::size_t cell, const Eigen::VectorXd& vertex_values) const;
  /// Value of the interpolant at a quadrature node of a cell.
  [[nodiscard]] double value_at(std::size_t cell, const QuadratureNode& node,
                                const Eigen::VectorXd& vertex_values) const;

  /// Integral by quadrature of a nodal function g(cell, node).
  [[nodiscard]] double integrate(
      const std::function<double(std::size_t, const QuadratureNode&)>& integrand) const;

  [[nodiscard]] bool same_as(const DiscreteSpace& other) const noexcept { return data_ == other.data_; }

 private:
  struct Data {
    Mesh mesh;
    BoundaryKind bc;
    int dof_count = 0;
    std::vector<int> dof_of_vertex;
    std::vector<int> vertex_of_dof;
    std::vector<QuadratureNode> nodes;       // 3 per cell
    std::vector<SmallVector> gradients;      // vertices_per_cell per cell
  };
  std::shared_ptr<const Data> data_;
};

DiscreteSpace build_space(const Mesh& mesh, BoundaryKind bc);

/// The pair (u, grad u) of a discrete function: dof coefficients and the exact
/// elementwise gradient of the interpolant.
struct WeakSolution {
  Eigen::VectorXd coeffs;
  std::vector<SmallVector> gradient;
  DiscreteSpace space;

  [[nodiscard]] Eigen::VectorXd vertex_values() const { return space.to_vertex_values(coeffs); }
};

WeakSolution make_solution(const DiscreteSpace& space, Eigen::VectorXd coeffs);

/// Vertex-value interpolant of an expression (all vertices, including
/// constrained ones).
Eigen::VectorXd interpolate(const Mesh& mesh, const ScalarExpr& expr);

}  // namespace degell
