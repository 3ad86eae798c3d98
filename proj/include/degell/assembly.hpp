#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "degell/fields.hpp"
#include "degell/problem.hpp"
#include "degell/space.hpp"

namespace degell {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Coefficients evaluated once at every quadrature node (cell-major, three
/// nodes per cell). Drift tuples only ever enter the bilinear form through
/// the contracted vectors sum_k H_k R_k and sum_k G_k S_k.
struct NodalCoefficients {
  std::vector<SmallMatrix> P;
  std::vector<SmallMatrix> Q;
  std::vector<SmallVector> HR;  ///< sum_k H_k R_k
  std::vector<SmallVector> GS;  ///< sum_k G_k S_k
  std::vector<SmallVector> gT;  ///< sum_k g_k T_k
  std::vector<double> F;
  std::vector<double> f;
  std::vector<double> H_norm;  ///< |H(x)|
  std::vector<double> G_norm;  ///< |G(x)|
  std::vector<double> g_norm;  ///< |g(x)|

  [[nodiscard]] static std::size_t index(std::size_t cell, std::size_t node) { return 3 * cell + node; }
};

/// Throws Error(Evaluation) naming the cell whose coefficient is not finite.
NodalCoefficients evaluate_coefficients(const DiscreteSpace& space, const ProblemSpec& problem);

/// Discrete bilinear form with its mass and degenerate-gradient Gram matrices.
///
/// A(i, j) = L(phi_j, phi_i) where
///   L(u, v) = int <grad v, P grad u> + v H.R u + u G.S v + F u v.
struct AssembledForm {
  SparseMatrix A;
  SparseMatrix M;   ///< int u v
  SparseMatrix Gq;  ///< int <grad u, Q grad v>
  double c1_hat = 1.0;
  double C1_hat = 1.0;
  DiscreteSpace space;
  std::shared_ptr<const ProblemSpec> problem;
  /// Non-fatal findings: failed subunit checks, comparability violations.
  std::vector<std::string> warnings;

  [[nodiscard]] int size() const { return static_cast<int>(A.rows()); }
};

AssembledForm assemble_form(const DiscreteSpace& space, const ProblemSpec& problem);

/// Assembles the adjoint operator directly (H,R and G,S exchanged) and checks
/// it against the transpose of the primal matrix; a relative mismatch above
/// 1e-9 throws Error(TransposeMismatch).
AssembledForm assemble_adjoint(const DiscreteSpace& space, const ProblemSpec& problem);

/// b(i) = int f phi_i + sum_k g_k T_k phi_i. Throws Error(InvalidData) when
/// |T| != |g|.
Eigen::VectorXd assemble_rhs(const DiscreteSpace& space, const ScalarExpr& f,
                             const SubunitTuple& T, const std::vector<ScalarExpr>& g);
Eigen::VectorXd assemble_rhs(const DiscreteSpace& space, const ProblemSpec& problem);

SparseMatrix assemble_mass(const DiscreteSpace& space);
SparseMatrix assemble_gram(const DiscreteSpace& space, const MatrixField& Q);

/// Values of W u at every quadrature node, grouped per cell.
std::vector<std::array<double, 3>> subunit_derivative(const DiscreteSpace& space,
                                                      const VectorField& W, const WeakSolution& u);
/// L2 norm of nodal values produced by subunit_derivative.
double nodal_l2_norm(const DiscreteSpace& space, const std::vector<std::array<double, 3>>& values);

/// ||u||_{QH1}^2 = u^T (M + Gq) u.
double qh1_norm(const AssembledForm& form, const Eigen::VectorXd& coeffs);
double l2_norm(const AssembledForm& form, const Eigen::VectorXd& coeffs);

/// L^p norm by quadrature of a nodal scalar (p = infinity allowed).
double nodal_lp_norm(const DiscreteSpace& space, const std::vector<double>& nodal, double p);

/// Norm of the data functional: ||f||_{L2} + sqrt(K) || |g| ||_{L2}.
double data_norm(const DiscreteSpace& space, const ProblemSpec& problem);

/// Sample points used for structural checks: all quadrature nodes plus a
/// seeded Halton set inside the domain.
std::vector<Point> structural_samples(const DiscreteSpace& space, const ProblemSpec& problem);

/// True when sum_k H_k R_k and sum_k G_k S_k agree at every quadrature node.
bool coefficients_self_adjoint(const DiscreteSpace& space, const ProblemSpec& problem,
                               double tol = 1e-12);

/// max |A - A^T| <= rel_tol * max |A|.
bool is_symmetric(const SparseMatrix& A, double rel_tol = 1e-12);

struct BoundednessReport {
  double empirical = 0.0;
  /// Closed-form bound from C1, the Poincare constant and coefficient norms;
  /// empty when no Poincare constant is available.
  std::optional<double> formula;
};

/// Largest sampled |u^T A v| / (||u|| ||v||) in the QH1 norm.
BoundednessReport check_boundedness(const AssembledForm& form, int trials, std::uint64_t seed,
                                    std::optional<double> poincare_constant = std::nullopt);

struct CoercivityReport {
  /// Smallest L2 shift making (c1/4)||u||^2 - u^T A u <= shift ||u||_{L2}^2 on every trial.
  double l2_shift = 0.0;
  bool holds = true;
  std::optional<std::string> warning;
};

/// Evaluates the almost-coercive estimate on seeded random vectors, the
/// constant vector and, for up to 2000 dofs, the exact extremal vector of the
/// discrete pencil.
CoercivityReport check_coercivity(const AssembledForm& form, int trials, std::uint64_t seed);

/// Vectors the coercivity estimate is evaluated on: trial_vectors plus the
/// exact discrete extremal vector when the form has at most 2000 dofs.
std::vector<Eigen::VectorXd> coercivity_candidates(const AssembledForm& form, int trials,
                                                   std::uint64_t seed);

/// The constant vector followed by `trials` seeded standard-normal vectors.
std::vector<Eigen::VectorXd> trial_vectors(int size, int trials, std::uint64_t seed);

}  // namespace degell
