#pragma once

#include <array>
#include <span>
#include <vector>

namespace degell {

/// Points are stored with two coordinates; 1D meshes leave y at zero.
using Point = std::array<double, 2>;

/// Axis-aligned bounding region of the declared domain. For intervals the
/// y-range is degenerate ([0, 0]).
struct Box {
  double x0 = 0.0;
  double x1 = 0.0;
  double y0 = 0.0;
  double y1 = 0.0;

  [[nodiscard]] double measure(int dimension) const;
};

/// Simplicial mesh of an interval or rectangle. Immutable once built.
///
/// Cells are stored as three vertex indices; segments use the first two and
/// set the third to -1.
class Mesh {
 public:
  using Cell = std::array<int, 3>;

  [[nodiscard]] int dimension() const noexcept { return dimension_; }
  [[nodiscard]] const Box& domain() const noexcept { return domain_; }
  [[nodiscard]] int vertices_per_cell() const noexcept { return dimension_ + 1; }

  [[nodiscard]] std::size_t vertex_count() const noexcept { return vertices_.size(); }
  [[nodiscard]] std::size_t cell_count() const noexcept { return cells_.size(); }

  [[nodiscard]] std::span<const Point> vertices() const noexcept { return vertices_; }
  [[nodiscard]] const Point& vertex(std::size_t i) const { return vertices_[i]; }
  [[nodiscard]] std::span<const Cell> cells() const noexcept { return cells_; }
  [[nodiscard]] const Cell& cell(std::size_t c) const { return cells_[c]; }
  [[nodiscard]] std::span<const double> cell_measures() const noexcept { return cell_measures_; }
  [[nodiscard]] double cell_measure(std::size_t c) const { return cell_measures_[c]; }

  /// Sorted indices of vertices on the boundary of the declared domain.
  [[nodiscard]] std::span<const int> boundary_vertices() const noexcept { return boundary_; }
  [[nodiscard]] bool is_boundary(std::size_t v) const { return on_boundary_[v]; }

  [[nodiscard]] double total_measure() const;

  /// Characteristic cell size (longest cell edge along the axes).
  [[nodiscard]] double mesh_size() const noexcept { return h_; }

  friend Mesh build_interval_mesh(double a, double b, int n);
  friend Mesh build_rect_mesh(std::array<double, 2> x_range, std::array<double, 2> y_range,
                              int nx, int ny);

 private:
  Mesh() = default;

  int dimension_ = 1;
  Box domain_{};
  double h_ = 0.0;
  std::vector<Point> vertices_;
  std::vector<Cell> cells_;
  std::vector<double> cell_measures_;
  std::vector<int> boundary_;
  std::vector<bool> on_boundary_;
};

/// Uniform partition of [a, b] into n segments.
Mesh build_interval_mesh(double a, double b, int n);

/// Structured triangulation of a rectangle: each grid cell is split along the
/// lower-left to upper-right diagonal. Vertex (i, j) has index j*(nx+1)+i.
Mesh build_rect_mesh(std::array<double, 2> x_range, std::array<double, 2> y_range, int nx,
                     int ny);

}  // namespace degell
