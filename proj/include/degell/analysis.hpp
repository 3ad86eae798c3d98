#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "degell/assembly.hpp"
#include "degell/problem.hpp"
#include "degell/solver.hpp"
#include "degell/space.hpp"

namespace degell {

/// Sign conditions on the lower-order part of the form. The `_i` variants
/// integrate G.S against grad(uv), the `_ii` variants H.R. Condition 1 asks
/// for int F u v + ... >= eps int u v with eps > 0 over all pairs, condition 2
/// for >= 0 over pairs vanishing on the boundary.
enum class NegativityCondition { Cond1I, Cond1II, Cond2I, Cond2II };

const char* to_string(NegativityCondition which) noexcept;
std::optional<NegativityCondition> parse_negativity_condition(std::string_view text);

/// Test data where an inequality is tightest or violated. Vectors hold vertex
/// values; `v` is empty for single-function inequalities.
struct Witness {
  std::string label;
  Eigen::VectorXd u;
  Eigen::VectorXd v;
  double value = 0.0;
};

struct InequalityReport {
  std::string name;
  bool holds = true;
  double constant = 0.0;
  std::optional<Witness> witness;
  int trials = 0;
  std::uint64_t seed = 0;
  /// Set when `constant` is only a lower bound on the true optimal constant.
  bool lower_bound = false;
  std::map<std::string, double> extras;
  std::vector<std::string> notes;
};

struct NegativityIntegral {
  double value = 0.0;    ///< int F u v + D.grad(uv), D = G.S or H.R
  double product = 0.0;  ///< int u v
};

/// Evaluates the negativity integrand for vertex values u and v on the mesh
/// of `space`, with grad(uv) = u grad v + v grad u at every quadrature node.
NegativityIntegral negativity_integral(const DiscreteSpace& space, const ProblemSpec& problem,
                                       NegativityCondition which, const Eigen::VectorXd& u,
                                       const Eigen::VectorXd& v);

/// Gradient of the product of two interpolants at a quadrature node.
SmallVector product_gradient(const DiscreteSpace& space, std::size_t cell, const QuadratureNode& node,
                             const Eigen::VectorXd& u, const Eigen::VectorXd& v);

/// Seeded random pairs with uv >= 0 plus truncation pairs (u, (u - k)+).
/// Throws Error(DegenerateSampling) when every pair has int uv < 1e-14.
InequalityReport check_negativity(const ProblemSpec& problem, const DiscreteSpace& space,
                                  NegativityCondition which, int trials, std::uint64_t seed);

struct UniquenessReport {
  bool precondition_met = false;
  bool holds = false;
  std::optional<Branch> branch;
  double solution_norm = 0.0;
  std::optional<double> epsilon;
  std::vector<std::string> notes;
};

/// Solves the homogeneous Neumann problem and checks it only admits zero,
/// provided negativity condition 1 (either variant) holds. Throws
/// Error(Precondition) on a Dirichlet space.
UniquenessReport verify_uniqueness(const ProblemSpec& problem, const DiscreteSpace& space);

struct MaxPrincipleReport {
  bool holds = false;
  double interior_max = 0.0;
  double boundary_max_positive = 0.0;  ///< max(0, max over boundary vertices)
  double tolerance = 0.0;
  double subsolution_residual_max = 0.0;  ///< max over interior vertices of (A u)_i
};

/// `u` holds one value per mesh vertex. Throws Error(InvalidInput) listing
/// the offending vertices when u is not a discrete subsolution, and
/// Error(Precondition) when negativity condition 2-i fails.
MaxPrincipleReport verify_max_principle(const ProblemSpec& problem, const DiscreteSpace& space,
                                        const Eigen::VectorXd& u);

/// Global Poincare constant of the mean-zero part on a Neumann space. r = 2
/// is exact (1 / sqrt(mu2) of the pencil (Gq, M)); r > 2 gives a sampled
/// lower bound. Throws Error(NoPoincare) when mu2 < 1e-12.
InequalityReport estimate_global_poincare(const DiscreteSpace& space, const MatrixField& Q, double r,
                                          double gain, int trials, std::uint64_t seed);

/// Sampled lower bound for ||f||_{L^{2 sigma}} <= C ||sqrt(Q) grad f|| on a
/// Dirichlet space.
InequalityReport estimate_global_sobolev(const DiscreteSpace& space, const MatrixField& Q, double sigma,
                                         int trials, std::uint64_t seed);

struct Ball {
  Point center{0.0, 0.0};
  double radius = 0.0;
};

/// Local Poincare quotient over Euclidean balls; membership by quadrature
/// node. Throws Error(InvalidBall) when a dilated ball leaves the domain or a
/// ball holds no quadrature node. `extra` adds test functions (vertex values).
InequalityReport estimate_local_poincare(const DiscreteSpace& space, const MatrixField& Q,
                                         const std::vector<Ball>& balls, double beta, int trials,
                                         std::uint64_t seed,
                                         const std::vector<Eigen::VectorXd>& extra = {});

/// Values of an interpolant (vertex values) at every quadrature node.
std::vector<double> nodal_values(const DiscreteSpace& space, const Eigen::VectorXd& vertex_values);

/// |sqrt(Q) grad w|^2 at every quadrature node.
std::vector<double> degenerate_gradient_squared(const DiscreteSpace& space, const MatrixField& Q,
                                                const Eigen::VectorXd& vertex_values);

}  // namespace degell
