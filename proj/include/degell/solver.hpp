#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "degell/assembly.hpp"
#include "degell/problem.hpp"
#include "degell/space.hpp"

namespace degell {

/// Shift gamma such that u^T (A + gamma M) u >= (c1/4) ||u||_{QH1}^2 on every
/// coercivity candidate. Throws Error(CoercivityFailure) when no admissible
/// shift is found (for instance P and Q not comparable).
double find_shift_gamma(const AssembledForm& form);

/// True when u^T (A + mu M) u >= (c1/4) ||u||_{QH1}^2 on every coercivity candidate.
bool coercive_at(const AssembledForm& form, double mu);

struct ShiftedSolution {
  WeakSolution solution;
  double mu = 0.0;
  double gamma = 0.0;
  double relative_residual = 0.0;
  double norm = 0.0;             ///< ||u||_{QH1}
  double functional_norm = 0.0;  ///< dual QH1 norm of the right-hand side
  double data_norm = 0.0;        ///< ||f|| + sqrt(K) || |g| || of the problem data
  double bound_constant = 0.0;   ///< 4 / c1
  bool stability_holds = false;  ///< norm <= bound_constant * functional_norm
};

/// Solves (A + mu M) u = rhs. Requires mu >= find_shift_gamma(form) or, for
/// smaller mu, that the shifted form is verified coercive; otherwise throws
/// Error(Precondition).
ShiftedSolution solve_shifted(const AssembledForm& form, double mu, const Eigen::VectorXd& rhs);

struct NullSpaces {
  std::vector<Eigen::VectorXd> N;      ///< ker A, M-orthonormal
  std::vector<Eigen::VectorXd> Nstar;  ///< ker A^T, M-orthonormal
  /// Smallest singular values (ascending) relative to the largest.
  std::vector<double> relative_singular_values;
  std::vector<std::string> warnings;
  bool dense = true;
};

NullSpaces null_spaces(const AssembledForm& form, double tol_rank);

enum class Branch { Unique, Alternative };

const char* to_string(Branch branch) noexcept;

struct FredholmOutcome {
  Branch branch = Branch::Unique;
  std::optional<WeakSolution> solution;
  int dim_N = 0;
  int dim_Nstar = 0;
  std::vector<WeakSolution> N_basis;
  std::vector<WeakSolution> Nstar_basis;
  std::optional<bool> compatible;
  /// int f w + g.T w for each adjoint null vector w scaled to max |w| = 1 and
  /// int w >= 0.
  std::vector<double> compatibility_residuals;
  /// ||A u - b|| / (||A|| ||u|| + ||b||), infinity norms.
  double galerkin_residual = 0.0;
  std::vector<std::string> warnings;
};

/// Fredholm engine on an assembled form and right-hand side.
FredholmOutcome solve_fredholm(const AssembledForm& form, const Eigen::VectorXd& rhs);

FredholmOutcome solve_neumann(const ProblemSpec& problem, const DiscreteSpace& space);
FredholmOutcome solve_dirichlet(const ProblemSpec& problem, const DiscreteSpace& space);

struct StabilityReport {
  double constant = 0.0;  ///< lhs / rhs, infinity when rhs = 0 < lhs
  double lhs = 0.0;       ///< ||u||_{QH1}
  double rhs = 0.0;       ///< ||f||_{L2} + sqrt(K) || |g| ||_{L2}
  bool holds = true;
  bool unbounded = false;
  std::optional<double> lambda_shift;
};

StabilityReport stability_report(const FredholmOutcome& outcome, const ProblemSpec& problem,
                                 std::optional<double> lambda_shift = std::nullopt);

}  // namespace degell
