#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "degell/expr.hpp"
#include "degell/mesh.hpp"

namespace degell {

/// Fixed-capacity (at most 2x2) dense types; no heap traffic in inner loops.
using SmallMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 2, 2>;
using SmallVector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 2, 1>;

/// Symmetric n x n matrix-valued coefficient. Only the upper triangle is
/// stored, so symmetry holds by construction.
class MatrixField {
 public:
  MatrixField() : upper_{ScalarExpr::constant(1.0)} {}

  static MatrixField identity(int n);
  static MatrixField zero(int n);
  /// Upper triangle in row-major order: n = 1 -> {a}; n = 2 -> {a11, a12, a22}.
  static MatrixField from_upper(int n, std::vector<ScalarExpr> upper);
  static MatrixField diagonal(std::vector<ScalarExpr> diag);

  [[nodiscard]] int dimension() const noexcept { return n_; }
  [[nodiscard]] const ScalarExpr& entry(int i, int j) const;
  [[nodiscard]] SmallMatrix operator()(const Point& p) const;

 private:
  int n_ = 1;
  std::vector<ScalarExpr> upper_;
};

class VectorField {
 public:
  VectorField() = default;
  explicit VectorField(std::vector<ScalarExpr> components) : components_(std::move(components)) {}

  [[nodiscard]] int dimension() const noexcept { return static_cast<int>(components_.size()); }
  [[nodiscard]] const ScalarExpr& component(int i) const { return components_[static_cast<std::size_t>(i)]; }
  [[nodiscard]] const std::vector<ScalarExpr>& components() const noexcept { return components_; }
  [[nodiscard]] SmallVector operator()(const Point& p) const;

 private:
  std::vector<ScalarExpr> components_;
};

/// Ordered tuple of vector fields, each expected to be subunit with respect to Q.
using SubunitTuple = std::vector<VectorField>;

struct SubunitWitness {
  Point point;
  SmallVector direction;
};

struct SubunitReport {
  bool ok = true;
  double worst_ratio = 0.0;
  std::optional<SubunitWitness> witness;
};

/// Tolerance used for the pointwise subunit inequality.
inline constexpr double kSubunitTolerance = 1e-10;

/// Samples (W.xi)^2 <= <xi, Q xi> over the given points and unit directions.
/// A 0/0 ratio counts as 1.
SubunitReport check_subunit(const VectorField& w, const MatrixField& q,
                            std::span<const Point> sample_points, int directions_per_point);

struct Comparability {
  double lower = 1.0;  ///< min <xi,P xi>/<xi,Q xi>
  double upper = 1.0;  ///< max <xi,P xi>/<xi,Q xi>
  std::size_t degenerate_samples = 0;
};

/// Smallest and largest sampled ratio <xi,P xi>/<xi,Q xi>. Samples where both
/// forms fall below 1e-14 are skipped; if every sample is skipped the ratio is
/// reported as (1, 1). Throws Error(ComparabilityViolation) with a witness
/// when exactly one of the forms vanishes.
Comparability estimate_comparability(const MatrixField& p, const MatrixField& q,
                                     std::span<const Point> sample_points,
                                     int directions_per_point);

/// Unit directions: +-1 in 1D; in 2D the four coordinate directions followed
/// by `count` equally spaced angles on the circle.
std::vector<SmallVector> sample_directions(int dimension, int count);

/// Deterministic Halton points (bases 2 and 3) strictly inside the box. The
/// seed selects the starting index of the sequence.
std::vector<Point> halton_points(const Box& box, int dimension, int count, std::uint64_t seed);

}  // namespace degell
