#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "degell/assembly.hpp"
#include "degell/problem.hpp"
#include "degell/space.hpp"

namespace degell {

struct SpectrumDiagnostics {
  double orthogonality_max = 0.0;  ///< max |u_i^T M u_j|, i != j
  double first_eigfn_min = 0.0;    ///< min over vertices of u_1 divided by max |u_1|
  bool monotone = true;            ///< real parts nondecreasing
  double residual_max = 0.0;       ///< max ||A u - lambda M u|| / (||A|| + |lambda| ||M||)
};

struct EigenvalueGroup {
  double value = 0.0;
  int multiplicity = 1;
};

struct SpectrumResult {
  Eigen::VectorXd eigenvalues;  ///< real parts, ascending
  Eigen::VectorXd imaginary;    ///< imaginary parts (all zero when self-adjoint)
  std::vector<EigenvalueGroup> groups;
  /// M-normalized; sign fixed so that int u >= 0. For complex pairs the real
  /// part of the eigenvector is reported.
  std::vector<WeakSolution> eigenfunctions;
  bool self_adjoint = true;
  SpectrumDiagnostics diagnostics;
};

/// Smallest k eigenpairs of A u = lambda M u. Throws Error(InvalidRequest)
/// when k is outside [1, dof_count] or a large non-self-adjoint spectrum is
/// requested.
SpectrumResult compute_spectrum(const AssembledForm& form, int k);

/// The same eigenpairs found one at a time by minimizing the Rayleigh
/// quotient on the M-orthogonal complement of the previous ones. Throws
/// Error(Precondition) on a non-self-adjoint form.
SpectrumResult rayleigh_recursion(const AssembledForm& form, int k);

/// |a - b| <= tol * max(|a|, |b|, 1) entrywise.
bool spectra_agree(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double tol = 1e-8);

struct SpectralClaims {
  bool monotone = true;
  double orthogonality_max = 0.0;
  bool orthogonal = true;  ///< checked in the self-adjoint case only
  std::optional<bool> positive;  ///< min eigenvalue > 0, only when negativity holds
  std::optional<double> qh1_orthogonality_max;  ///< only when P and Q coincide
  bool first_eigfn_nonnegative = true;
  bool holds = true;
  std::vector<std::string> notes;
};

SpectralClaims verify_spectral_claims(const SpectrumResult& result, const AssembledForm& form,
                                      std::optional<bool> negativity_holds = std::nullopt);

struct ConvergenceLevel {
  int resolution = 0;
  double h = 0.0;
  Eigen::VectorXd eigenvalues;
};

/// Empirical order from three successive levels, or exact when the
/// eigenvalue does not move.
struct ConvergenceRate {
  std::optional<double> rate;
  bool exact = false;
};

struct ConvergenceTable {
  std::vector<ConvergenceLevel> levels;
  /// rates[i][j]: eigenvalue i, levels j, j+1, j+2.
  std::vector<std::vector<ConvergenceRate>> rates;
};

/// Requires at least three resolutions (Error(InvalidRequest) otherwise).
ConvergenceTable eigenvalue_convergence(const ProblemSpec& problem, const std::vector<int>& resolutions,
                                        int k);

}  // namespace degell
