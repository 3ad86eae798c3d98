#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "degell/expr.hpp"
#include "degell/fields.hpp"
#include "degell/mesh.hpp"

namespace degell {

enum class BoundaryKind { Neumann, Dirichlet };

const char* to_string(BoundaryKind kind) noexcept;

struct DomainSpec {
  enum class Kind { Interval, Rect };

  Kind kind = Kind::Interval;
  std::array<double, 2> x_range{0.0, 1.0};
  std::array<double, 2> y_range{0.0, 1.0};
  int nx = 10;
  int ny = 10;

  [[nodiscard]] int dimension() const noexcept { return kind == Kind::Interval ? 1 : 2; }
};

/// Integrability exponents of the data and the declared gains of the
/// Poincare (omega) and Sobolev (sigma) inequalities.
struct Exponents {
  double t = 4.0;
  double q = 8.0;
  double omega = 2.0;
  double sigma = 2.0;
};

struct Numerics {
  std::uint64_t seed = 20240917;
  int trials = 200;
  int negativity_trials = 500;
  double tol_rank = 1e-9;
  int directions = 32;
  int sample_points = 64;
  int eigen_count = 4;
  /// Externally supplied global weak Poincare constant, when known.
  std::optional<double> poincare_constant;
};

/// Full description of one operator
///   X u = -div(P grad u) + H.R u + S'(G u) + F u
/// together with its data f, (T, g), domain, boundary kind and numerics.
struct ProblemSpec {
  DomainSpec domain;
  BoundaryKind bc = BoundaryKind::Neumann;

  MatrixField P = MatrixField::identity(1);
  MatrixField Q = MatrixField::identity(1);
  std::vector<ScalarExpr> H;
  std::vector<ScalarExpr> G;
  SubunitTuple R;
  SubunitTuple S;
  ScalarExpr F;

  ScalarExpr f;
  std::vector<ScalarExpr> g;
  SubunitTuple T;

  /// Optional candidate function for maximum-principle checks.
  std::optional<ScalarExpr> candidate;

  Exponents exponents;
  Numerics numerics;

  [[nodiscard]] int dimension() const noexcept { return domain.dimension(); }
  [[nodiscard]] std::size_t drift_count() const noexcept { return std::max(H.size(), G.size()); }

  /// Tuple lengths and field dimensions; throws Error(InvalidData).
  void validate() const;

  /// Exponent thresholds of the active existence theory; violations are
  /// reported, never fatal.
  [[nodiscard]] std::vector<std::string> exponent_warnings() const;

  /// The formal adjoint: (H, R) and (G, S) exchange roles.
  [[nodiscard]] ProblemSpec adjoint() const;

  /// Same operator with f and g replaced by zero.
  [[nodiscard]] ProblemSpec homogeneous() const;
};

/// Mesh of the declared domain; `resolution` overrides nx (and ny in 2D).
Mesh build_mesh(const ProblemSpec& problem, std::optional<int> resolution = std::nullopt);

/// A problem on a 1D or 2D domain with P = Q = identity and nothing else.
ProblemSpec laplacian_problem(DomainSpec domain, BoundaryKind bc);

}  // namespace degell
