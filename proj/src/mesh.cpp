#include "degell/mesh.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "degell/error.hpp"

namespace degell {

double Box::measure(int dimension) const {
  return dimension == 1 ? (x1 - x0) : (x1 - x0) * (y1 - y0);
}

double Mesh::total_measure() const {
  return std::accumulate(cell_measures_.begin(), cell_measures_.end(), 0.0);
}

namespace {

void require_interval(double lo, double hi, const char* what) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
    throw Error(ErrorKind::InvalidDomain, std::string(what) + " must satisfy lower < upper, got (" +
                                              std::to_string(lo) + ", " + std::to_string(hi) + ")");
  }
}

void require_resolution(int n, const char* what) {
  if (n < 1) {
    throw Error(ErrorKind::InvalidResolution,
                std::string(what) + " must be at least 1, got " + std::to_string(n));
  }
}

// Grid coordinate i of n on [lo, hi]; endpoints are hit exactly.
double grid_coordinate(double lo, double hi, int i, int n) {
  if (i == n) return hi;
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n);
}

}  // namespace

Mesh build_interval_mesh(double a, double b, int n) {
  require_interval(a, b, "interval");
  require_resolution(n, "interval resolution");

  Mesh mesh;
  mesh.dimension_ = 1;
  mesh.domain_ = Box{a, b, 0.0, 0.0};
  const double h = (b - a) / static_cast<double>(n);
  mesh.h_ = h;

  mesh.vertices_.reserve(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) mesh.vertices_.push_back({grid_coordinate(a, b, i, n), 0.0});

  mesh.cells_.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) mesh.cells_.push_back({i, i + 1, -1});

  // Uniform partition: every cell has measure exactly (b - a)/n.
  mesh.cell_measures_.assign(static_cast<std::size_t>(n), h);

  mesh.boundary_ = {0, n};
  mesh.on_boundary_.assign(mesh.vertices_.size(), false);
  mesh.on_boundary_.front() = true;
  mesh.on_boundary_.back() = true;
  return mesh;
}

Mesh build_rect_mesh(std::array<double, 2> x_range, std::array<double, 2> y_range, int nx,
                     int ny) {
  require_interval(x_range[0], x_range[1], "x range");
  require_interval(y_range[0], y_range[1], "y range");
  require_resolution(nx, "nx");
  require_resolution(ny, "ny");

  Mesh mesh;
  mesh.dimension_ = 2;
  mesh.domain_ = Box{x_range[0], x_range[1], y_range[0], y_range[1]};
  const double hx = (x_range[1] - x_range[0]) / nx;
  const double hy = (y_range[1] - y_range[0]) / ny;
  mesh.h_ = std::max(hx, hy);

  const auto index = [nx](int i, int j) { return j * (nx + 1) + i; };

  mesh.vertices_.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1)));
  mesh.on_boundary_.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1)));
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      mesh.vertices_.push_back(
          {grid_coordinate(x_range[0], x_range[1], i, nx), grid_coordinate(y_range[0], y_range[1], j, ny)});
      const bool boundary = i == 0 || i == nx || j == 0 || j == ny;
      mesh.on_boundary_.push_back(boundary);
      if (boundary) mesh.boundary_.push_back(index(i, j));
    }
  }

  const double area = 0.5 * hx * hy;
  mesh.cells_.reserve(static_cast<std::size_t>(2 * nx * ny));
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int v00 = index(i, j);
      const int v10 = index(i + 1, j);
      const int v11 = index(i + 1, j + 1);
      const int v01 = index(i, j + 1);
      mesh.cells_.push_back({v00, v10, v11});
      mesh.cells_.push_back({v00, v11, v01});
    }
  }
  mesh.cell_measures_.assign(mesh.cells_.size(), area);
  return mesh;
}

}  // namespace degell
