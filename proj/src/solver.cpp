#include "degell/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "degell/dense.hpp"
#include "degell/error.hpp"

namespace degell {

const char* to_string(Branch branch) noexcept {
  return branch == Branch::Unique ? "unique" : "alternative";
}

namespace {

constexpr double kShiftMargin = 1e-6;

bool verify_shift(const AssembledForm& form, const std::vector<Eigen::VectorXd>& candidates, double mu) {
  const double quarter = form.c1_hat / 4.0;
  for (const auto& u : candidates) {
    const double l2sq = u.dot(form.M * u);
    const double qh1sq = l2sq + u.dot(form.Gq * u);
    const double lhs = u.dot(form.A * u) + mu * l2sq;
    if (lhs < quarter * qh1sq - 1e-12 * std::max(1.0, std::abs(lhs))) return false;
  }
  return true;
}

const ProblemSpec& problem_of(const AssembledForm& form) { return *form.problem; }

double inf_norm(const SparseMatrix& A) {
  Eigen::VectorXd rows = Eigen::VectorXd::Zero(A.rows());
  for (int k = 0; k < A.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(A, k); it; ++it) rows(it.row()) += std::abs(it.value());
  }
  return rows.size() ? rows.maxCoeff() : 0.0;
}

double inf_norm(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

Eigen::VectorXd sparse_solve(const SparseMatrix& K, const Eigen::VectorXd& b) {
  Eigen::SparseLU<SparseMatrix> lu;
  lu.compute(K);
  if (lu.info() != Eigen::Success) {
    throw Error(ErrorKind::SingularSystem, "sparse LU factorization failed: " + lu.lastErrorMessage());
  }
  Eigen::VectorXd x = lu.solve(b);
  if (lu.info() != Eigen::Success || !x.allFinite()) {
    throw Error(ErrorKind::SingularSystem, "sparse LU solve failed");
  }
  return x;
}

// sqrt(b^T (M + Gq)^{-1} b): the norm of the functional v -> b.v on the
// discrete QH1 space.
double functional_norm(const AssembledForm& form, const Eigen::VectorXd& b) {
  if (b.size() == 0) return 0.0;
  SparseMatrix gram = form.M + form.Gq;
  Eigen::SimplicialLDLT<SparseMatrix> ldlt(gram);
  if (ldlt.info() != Eigen::Success) {
    throw Error(ErrorKind::SingularSystem, "QH1 Gram factorization failed");
  }
  const Eigen::VectorXd y = ldlt.solve(b);
  return std::sqrt(std::max(b.dot(y), 0.0));
}

// Sign so that int w >= 0, scale so that max |w| = 1.
Eigen::VectorXd residual_normalized(const AssembledForm& form, const Eigen::VectorXd& w) {
  Eigen::VectorXd out = w / inf_norm(w);
  if (Eigen::VectorXd::Ones(out.size()).dot(form.M * out) < 0.0) out = -out;
  return out;
}

double estimate_sigma_max(const SparseMatrix& A) {
  Eigen::VectorXd x = Eigen::VectorXd::Ones(A.cols());
  double sigma = 0.0;
  for (int it = 0; it < 100; ++it) {
    Eigen::VectorXd y = A.transpose() * (A * x);
    const double norm = y.norm();
    if (norm == 0.0) return 0.0;
    const double next = std::sqrt(norm / x.norm());
    x = y / norm;
    if (std::abs(next - sigma) <= 1e-6 * next) return next;
    sigma = next;
  }
  return sigma;
}

// Kernel of A via block shift-invert subspace iteration on (A + delta M)^{-1} M
// followed by an SVD of A restricted to the converged block.
std::vector<Eigen::VectorXd> sparse_kernel(const SparseMatrix& A, const SparseMatrix& M, double tol,
                                           double sigma_max, std::vector<double>& relative_sv) {
  const Eigen::Index n = A.rows();
  const int block = static_cast<int>(std::min<Eigen::Index>(n, 8));
  const double delta = 1e-6 * inf_norm(A) / std::max(inf_norm(M), std::numeric_limits<double>::min());
  SparseMatrix shifted = A + delta * M;
  shifted.makeCompressed();
  Eigen::SparseLU<SparseMatrix> lu;
  lu.compute(shifted);
  if (lu.info() != Eigen::Success) {
    throw Error(ErrorKind::SingularSystem, "shifted factorization for kernel search failed");
  }
  Eigen::MatrixXd X(n, block);
  for (int j = 0; j < block; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      X(i, j) = 1.0 + std::sin(static_cast<double>((i + 1) * (j + 1)) * 0.7548776662466927);
    }
  }
  for (int sweep = 0; sweep < 40; ++sweep) {
    Eigen::MatrixXd Y(n, block);
    for (int j = 0; j < block; ++j) Y.col(j) = lu.solve(M * X.col(j));
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(Y);
    X = qr.householderQ() * Eigen::MatrixXd::Identity(n, block);
  }
  const Eigen::MatrixXd AX = A * X;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(AX, Eigen::ComputeThinV);
  const Eigen::VectorXd sv = svd.singularValues();
  std::vector<Eigen::VectorXd> kernel;
  for (Eigen::Index k = sv.size() - 1; k >= 0; --k) {
    const double rel = sigma_max > 0.0 ? sv(k) / sigma_max : 0.0;
    relative_sv.push_back(rel);
    if (rel < tol) kernel.push_back(X * svd.matrixV().col(k));
  }
  return kernel;
}

void add_ambiguity_warning(NullSpaces& out, double tol) {
  for (double s : out.relative_singular_values) {
    if (s >= tol / 10.0 && s <= tol * 10.0) {
      std::ostringstream os;
      os << "rank decision ambiguous: relative singular value " << s << " is within a factor 10 of "
         << tol;
      out.warnings.push_back(os.str());
      return;
    }
  }
}

struct KernelData {
  NullSpaces spaces;
  // Dense pseudo-inverse ingredients (empty on the sparse path).
  Eigen::MatrixXd U;
  Eigen::MatrixXd V;
  Eigen::VectorXd sv;
  double threshold = 0.0;
};

KernelData compute_kernel(const AssembledForm& form, double tol) {
  KernelData data;
  NullSpaces& out = data.spaces;
  const int n = form.size();
  if (n == 0) return data;

  if (n <= kDenseLimit) {
    const Eigen::MatrixXd A = to_dense(form.A);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
    data.U = svd.matrixU();
    data.V = svd.matrixV();
    data.sv = svd.singularValues();
    const double smax = data.sv(0);
    data.threshold = tol * smax;
    std::vector<double> rel(static_cast<std::size_t>(n));
    for (Eigen::Index k = 0; k < n; ++k) {
      rel[static_cast<std::size_t>(k)] = smax > 0.0 ? data.sv(k) / smax : 0.0;
      if (smax == 0.0 || data.sv(k) < data.threshold) {
        out.N.push_back(data.V.col(k));
        out.Nstar.push_back(data.U.col(k));
      }
    }
    out.relative_singular_values = std::move(rel);
  } else {
    out.dense = false;
    const double smax = estimate_sigma_max(form.A);
    std::vector<double> rel_a;
    std::vector<double> rel_t;
    const SparseMatrix At = form.A.transpose();
    out.N = sparse_kernel(form.A, form.M, tol, smax, rel_a);
    out.Nstar = sparse_kernel(At, form.M, tol, smax, rel_t);
    out.relative_singular_values = rel_a;
    if (out.N.size() != out.Nstar.size()) {
      out.warnings.push_back("iterative kernel search found different dimensions for A and A^T");
    }
  }
  add_ambiguity_warning(out, tol);
  // Keep only the diagnostic prefix.
  std::sort(out.relative_singular_values.begin(), out.relative_singular_values.end());
  if (out.relative_singular_values.size() > 8) out.relative_singular_values.resize(8);

  m_orthonormalize(out.N, form.M);
  m_orthonormalize(out.Nstar, form.M);
  return data;
}

// Solution of A u = b orthogonal (in M) to ker A on the sparse path, via the
// bordered system [A Z*; N^T M 0].
Eigen::VectorXd bordered_solve(const AssembledForm& form, const NullSpaces& ns, const Eigen::VectorXd& b) {
  const int n = form.size();
  const int d = static_cast<int>(ns.N.size());
  std::vector<Eigen::Triplet<double>> trip;
  for (int k = 0; k < form.A.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(form.A, k); it; ++it) trip.emplace_back(it.row(), it.col(), it.value());
  }
  for (int j = 0; j < d; ++j) {
    const Eigen::VectorXd mn = form.M * ns.N[static_cast<std::size_t>(j)];
    for (int i = 0; i < n; ++i) {
      trip.emplace_back(i, n + j, ns.Nstar[static_cast<std::size_t>(j)](i));
      trip.emplace_back(n + j, i, mn(i));
    }
  }
  SparseMatrix K(n + d, n + d);
  K.setFromTriplets(trip.begin(), trip.end());
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + d);
  rhs.head(n) = b;
  return sparse_solve(K, rhs).head(n);
}

}  // namespace

double find_shift_gamma(const AssembledForm& form) {
  if (!(form.c1_hat > 0.0) || !std::isfinite(form.C1_hat)) {
    throw Error(ErrorKind::CoercivityFailure,
                "P is not comparable with Q on the sampled points; no coercive shift exists");
  }
  const auto& numerics = problem_of(form).numerics;
  const auto report = check_coercivity(form, numerics.trials, numerics.seed);
  const auto candidates = coercivity_candidates(form, numerics.trials, numerics.seed);
  double margin = kShiftMargin;
  for (int attempt = 0; attempt <= 3; ++attempt) {
    const double gamma = report.l2_shift + form.c1_hat / 4.0 + margin;
    if (verify_shift(form, candidates, gamma)) return gamma;
    margin *= 2.0;
  }
  throw Error(ErrorKind::CoercivityFailure, "shifted form failed verification after 3 margin doublings");
}

bool coercive_at(const AssembledForm& form, double mu) {
  if (!(form.c1_hat > 0.0)) return false;
  const auto& numerics = problem_of(form).numerics;
  return verify_shift(form, coercivity_candidates(form, numerics.trials, numerics.seed), mu);
}

ShiftedSolution solve_shifted(const AssembledForm& form, double mu, const Eigen::VectorXd& rhs) {
  if (rhs.size() != form.size()) {
    throw Error(ErrorKind::InvalidData, "right-hand side length does not match the form");
  }
  const double gamma = find_shift_gamma(form);
  if (mu < gamma && !coercive_at(form, mu)) {
    std::ostringstream os;
    os << "mu = " << mu << " is below the coercivity shift gamma = " << gamma;
    throw Error(ErrorKind::Precondition, os.str());
  }
  SparseMatrix K = form.A + mu * form.M;
  K.makeCompressed();
  Eigen::VectorXd u = sparse_solve(K, rhs);

  ShiftedSolution out{.solution = make_solution(form.space, u), .mu = mu, .gamma = gamma};
  const double bnorm = rhs.norm();
  out.relative_residual = bnorm > 0.0 ? (K * u - rhs).norm() / bnorm : (K * u).norm();
  out.norm = qh1_norm(form, u);
  out.functional_norm = functional_norm(form, rhs);
  out.data_norm = data_norm(form.space, problem_of(form));
  out.bound_constant = 4.0 / form.c1_hat;
  out.stability_holds = out.norm <= out.bound_constant * out.functional_norm * (1.0 + 1e-10) + 1e-14;
  return out;
}

NullSpaces null_spaces(const AssembledForm& form, double tol_rank) {
  return compute_kernel(form, tol_rank).spaces;
}

FredholmOutcome solve_fredholm(const AssembledForm& form, const Eigen::VectorXd& rhs) {
  if (rhs.size() != form.size()) {
    throw Error(ErrorKind::InvalidData, "right-hand side length does not match the form");
  }
  const double tol = problem_of(form).numerics.tol_rank;
  const KernelData kernel = compute_kernel(form, tol);
  const NullSpaces& ns = kernel.spaces;

  FredholmOutcome out;
  out.warnings = ns.warnings;
  out.dim_N = static_cast<int>(ns.N.size());
  out.dim_Nstar = static_cast<int>(ns.Nstar.size());
  for (const auto& w : ns.N) out.N_basis.push_back(make_solution(form.space, w));
  for (const auto& w : ns.Nstar) out.Nstar_basis.push_back(make_solution(form.space, w));

  Eigen::VectorXd u;
  if (out.dim_N == 0 && out.dim_Nstar == 0) {
    out.branch = Branch::Unique;
    u = sparse_solve(form.A, rhs);
  } else {
    out.branch = Branch::Alternative;
    const double scale = functional_norm(form, rhs);
    bool compatible = true;
    for (const auto& w : ns.Nstar) {
      const Eigen::VectorXd scaled = residual_normalized(form, w);
      const double r = rhs.dot(scaled);
      out.compatibility_residuals.push_back(r);
      const double wnorm = std::sqrt(scaled.dot(form.M * scaled));
      if (std::abs(r) > 1e-9 * wnorm * scale) compatible = false;
    }
    out.compatible = compatible;
    if (!compatible) return out;

    if (ns.dense) {
      // Minimum-norm solution through the truncated SVD.
      const Eigen::VectorXd utb = kernel.U.transpose() * rhs;
      Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(kernel.sv.size());
      for (Eigen::Index k = 0; k < kernel.sv.size(); ++k) {
        if (kernel.sv(k) >= kernel.threshold && kernel.sv(k) > 0.0) coeffs(k) = utb(k) / kernel.sv(k);
      }
      u = kernel.V * coeffs;
    } else {
      u = bordered_solve(form, ns, rhs);
    }
    for (const auto& w : ns.N) u -= w.dot(form.M * u) * w;
  }

  const double denom = inf_norm(form.A) * inf_norm(u) + inf_norm(rhs);
  const double res = inf_norm(Eigen::VectorXd(form.A * u - rhs));
  out.galerkin_residual = denom > 0.0 ? res / denom : res;
  if (out.galerkin_residual > 1e-10) {
    std::ostringstream os;
    os << "Galerkin residual " << out.galerkin_residual << " exceeds 1e-10";
    out.warnings.push_back(os.str());
  }
  out.solution = make_solution(form.space, std::move(u));
  return out;
}

FredholmOutcome solve_neumann(const ProblemSpec& problem, const DiscreteSpace& space) {
  if (space.bc() != BoundaryKind::Neumann) {
    throw Error(ErrorKind::Precondition, "solve_neumann needs a Neumann space");
  }
  const AssembledForm form = assemble_form(space, problem);
  return solve_fredholm(form, assemble_rhs(space, problem));
}

FredholmOutcome solve_dirichlet(const ProblemSpec& problem, const DiscreteSpace& space) {
  if (space.bc() != BoundaryKind::Dirichlet) {
    throw Error(ErrorKind::Precondition, "solve_dirichlet needs a Dirichlet space");
  }
  const AssembledForm form = assemble_form(space, problem);
  return solve_fredholm(form, assemble_rhs(space, problem));
}

StabilityReport stability_report(const FredholmOutcome& outcome, const ProblemSpec& problem,
                                 std::optional<double> lambda_shift) {
  if (!outcome.solution) {
    throw Error(ErrorKind::Precondition, "stability report needs an outcome carrying a solution");
  }
  const auto& u = *outcome.solution;
  const SparseMatrix M = assemble_mass(u.space);
  const SparseMatrix Gq = assemble_gram(u.space, problem.Q);
  StabilityReport report;
  report.lambda_shift = lambda_shift;
  report.lhs = std::sqrt(std::max(u.coeffs.dot(M * u.coeffs) + u.coeffs.dot(Gq * u.coeffs), 0.0));
  report.rhs = data_norm(u.space, problem);
  if (report.rhs > 0.0) {
    report.constant = report.lhs / report.rhs;
  } else if (report.lhs > 1e-14) {
    report.constant = std::numeric_limits<double>::infinity();
    report.unbounded = true;
  }
  return report;
}

}  // namespace degell
