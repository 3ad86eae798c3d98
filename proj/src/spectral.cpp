#include "degell/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

#include "degell/dense.hpp"
#include "degell/error.hpp"
#include "degell/solver.hpp"

namespace degell {

namespace {

constexpr double kGroupTolerance = 1e-8;

double inf_norm(const SparseMatrix& A) {
  Eigen::VectorXd rows = Eigen::VectorXd::Zero(A.rows());
  for (int k = 0; k < A.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(A, k); it; ++it) rows(it.row()) += std::abs(it.value());
  }
  return rows.size() ? rows.maxCoeff() : 0.0;
}

bool close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({std::abs(a), std::abs(b), 1.0});
}

void m_normalize_and_sign(Eigen::VectorXd& u, const SparseMatrix& M) {
  const double norm = std::sqrt(std::max(u.dot(M * u), 0.0));
  if (norm > 0.0) u /= norm;
  if (Eigen::VectorXd::Ones(u.size()).dot(M * u) < 0.0) u = -u;
}

void finalize(SpectrumResult& result, const AssembledForm& form, std::vector<Eigen::VectorXd> vectors) {
  const auto count = static_cast<std::size_t>(result.eigenvalues.size());
  result.eigenfunctions.clear();
  for (auto& v : vectors) {
    m_normalize_and_sign(v, form.M);
    result.eigenfunctions.push_back(make_solution(form.space, v));
  }

  result.groups.clear();
  for (std::size_t i = 0; i < count; ++i) {
    const double value = result.eigenvalues(static_cast<Eigen::Index>(i));
    if (!result.groups.empty() && close(result.groups.back().value, value, kGroupTolerance) &&
        result.imaginary(static_cast<Eigen::Index>(i)) == 0.0) {
      ++result.groups.back().multiplicity;
    } else {
      result.groups.push_back({value, 1});
    }
  }

  auto& diag = result.diagnostics;
  diag = {};
  for (std::size_t i = 1; i < count; ++i) {
    if (result.eigenvalues(static_cast<Eigen::Index>(i)) <
        result.eigenvalues(static_cast<Eigen::Index>(i - 1)) -
            kGroupTolerance * std::max(1.0, std::abs(result.eigenvalues(static_cast<Eigen::Index>(i))))) {
      diag.monotone = false;
    }
  }
  const double a_norm = inf_norm(form.A);
  const double m_norm = inf_norm(form.M);
  for (std::size_t i = 0; i < count; ++i) {
    const auto& ui = result.eigenfunctions[i].coeffs;
    for (std::size_t j = i + 1; j < count; ++j) {
      diag.orthogonality_max =
          std::max(diag.orthogonality_max, std::abs(ui.dot(form.M * result.eigenfunctions[j].coeffs)));
    }
    if (result.imaginary(static_cast<Eigen::Index>(i)) == 0.0) {
      const double lambda = result.eigenvalues(static_cast<Eigen::Index>(i));
      const Eigen::VectorXd r = form.A * ui - lambda * (form.M * ui);
      const double scale = a_norm + std::abs(lambda) * m_norm;
      const double res = r.size() ? r.cwiseAbs().maxCoeff() / std::max(scale, 1e-300) : 0.0;
      diag.residual_max = std::max(diag.residual_max, res);
    }
  }
  if (count > 0) {
    const Eigen::VectorXd v = result.eigenfunctions.front().vertex_values();
    const double peak = v.cwiseAbs().maxCoeff();
    diag.first_eigfn_min = peak > 0.0 ? v.minCoeff() / peak : 0.0;
  }
}

SpectrumResult dense_symmetric(const AssembledForm& form, int k) {
  const EigenPairs pairs = symmetric_pencil(to_dense(form.A), to_dense(form.M));
  SpectrumResult result;
  result.self_adjoint = true;
  result.eigenvalues = pairs.values.head(k);
  result.imaginary = Eigen::VectorXd::Zero(k);
  std::vector<Eigen::VectorXd> vectors;
  for (int i = 0; i < k; ++i) vectors.emplace_back(pairs.vectors.col(i));
  finalize(result, form, std::move(vectors));
  return result;
}

SpectrumResult dense_general(const AssembledForm& form, int k) {
  const Eigen::MatrixXd M = to_dense(form.M);
  const Eigen::MatrixXd C = M.llt().solve(to_dense(form.A));
  Eigen::EigenSolver<Eigen::MatrixXd> solver(C, true);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::SingularSystem, "general eigensolver did not converge");
  }
  const Eigen::VectorXcd values = solver.eigenvalues();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(values.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (values(a).real() != values(b).real()) return values(a).real() < values(b).real();
    return values(a).imag() < values(b).imag();
  });

  SpectrumResult result;
  result.self_adjoint = false;
  result.eigenvalues.resize(k);
  result.imaginary.resize(k);
  std::vector<Eigen::VectorXd> vectors;
  for (int i = 0; i < k; ++i) {
    const Eigen::Index idx = order[static_cast<std::size_t>(i)];
    const double im = values(idx).imag();
    result.eigenvalues(i) = values(idx).real();
    result.imaginary(i) = std::abs(im) <= 1e-12 * std::max(1.0, std::abs(values(idx).real())) ? 0.0 : im;
    const Eigen::VectorXcd vec = solver.eigenvectors().col(idx);
    Eigen::VectorXd re = vec.real();
    if (re.norm() < 1e-8 * vec.norm()) re = vec.imag();
    vectors.push_back(std::move(re));
  }
  finalize(result, form, std::move(vectors));
  return result;
}

void check_count(const AssembledForm& form, int k) {
  if (k < 1 || k > form.size()) {
    std::ostringstream os;
    os << "requested " << k << " eigenpairs but the space has " << form.size() << " dofs";
    throw Error(ErrorKind::InvalidRequest, os.str());
  }
}

}  // namespace

SpectrumResult compute_spectrum(const AssembledForm& form, int k) {
  check_count(form, k);
  const bool symmetric = is_symmetric(form.A);
  if (form.size() <= kDenseLimit) return symmetric ? dense_symmetric(form, k) : dense_general(form, k);
  if (!symmetric) {
    throw Error(ErrorKind::InvalidRequest,
                "non-self-adjoint spectra are only computed for up to 2000 dofs");
  }
  const double gamma = find_shift_gamma(form);
  const EigenPairs pairs = smallest_pencil_sparse(form.A, form.M, k, -gamma);
  SpectrumResult result;
  result.eigenvalues = pairs.values;
  result.imaginary = Eigen::VectorXd::Zero(pairs.values.size());
  std::vector<Eigen::VectorXd> vectors;
  for (Eigen::Index i = 0; i < pairs.vectors.cols(); ++i) vectors.emplace_back(pairs.vectors.col(i));
  finalize(result, form, std::move(vectors));
  return result;
}

SpectrumResult rayleigh_recursion(const AssembledForm& form, int k) {
  if (!is_symmetric(form.A)) {
    throw Error(ErrorKind::Precondition, "Rayleigh recursion needs a self-adjoint form; not self-adjoint");
  }
  check_count(form, k);
  const Eigen::Index n = form.size();
  const double shift = find_shift_gamma(form);
  SparseMatrix K = form.A + shift * form.M;
  K.makeCompressed();
  Eigen::SparseLU<SparseMatrix> lu;
  lu.compute(K);
  if (lu.info() != Eigen::Success) throw Error(ErrorKind::SingularSystem, "shifted factorization failed");

  std::vector<Eigen::VectorXd> found;
  auto deflate = [&](Eigen::VectorXd& x) {
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& u : found) x -= u.dot(form.M * x) * u;
    }
    const double norm = std::sqrt(std::max(x.dot(form.M * x), 0.0));
    if (norm > 0.0) x /= norm;
  };

  SpectrumResult result;
  result.eigenvalues.resize(k);
  result.imaginary = Eigen::VectorXd::Zero(k);
  for (int j = 0; j < k; ++j) {
    Eigen::VectorXd x(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      x(i) = 1.0 + 0.5 * std::sin(0.7548776662466927 * static_cast<double>((i + 1) * (j + 1)));
    }
    deflate(x);
    double rho = x.dot(form.A * x);
    // Minimize the quotient on the deflated space by inverse iteration.
    for (int it = 0; it < 2000; ++it) {
      Eigen::VectorXd y = lu.solve(form.M * x);
      deflate(y);
      const double next = y.dot(form.A * y);
      x = std::move(y);
      const bool settled = std::abs(next - rho) <= 1e-14 * std::max(1.0, std::abs(next));
      rho = next;
      if (settled && it > 3) break;
    }
    // Polish with Rayleigh quotient iteration.
    for (int it = 0; it < 4; ++it) {
      const Eigen::VectorXd r = form.A * x - rho * (form.M * x);
      if (r.norm() <= 1e-14 * std::max(1.0, std::abs(rho)) * std::sqrt(static_cast<double>(n))) break;
      SparseMatrix S = form.A - rho * form.M;
      S.makeCompressed();
      Eigen::SparseLU<SparseMatrix> slu;
      slu.compute(S);
      if (slu.info() != Eigen::Success) break;
      Eigen::VectorXd y = slu.solve(form.M * x);
      if (slu.info() != Eigen::Success || !y.allFinite()) break;
      deflate(y);
      x = std::move(y);
      rho = x.dot(form.A * x);
    }
    result.eigenvalues(j) = rho;
    found.push_back(x);
  }
  finalize(result, form, std::move(found));
  return result;
}

bool spectra_agree(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double tol) {
  if (a.size() != b.size()) return false;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (!close(a(i), b(i), tol)) return false;
  }
  return true;
}

SpectralClaims verify_spectral_claims(const SpectrumResult& result, const AssembledForm& form,
                                      std::optional<bool> negativity_holds) {
  SpectralClaims claims;
  claims.monotone = result.diagnostics.monotone;
  claims.orthogonality_max = result.diagnostics.orthogonality_max;
  if (result.self_adjoint) {
    claims.orthogonal = claims.orthogonality_max <= 1e-8;
  } else {
    claims.notes.push_back("non-self-adjoint: orthogonality not asserted");
  }
  if (negativity_holds.value_or(false)) {
    claims.positive = result.eigenvalues.size() > 0 && result.eigenvalues.minCoeff() > 0.0;
  } else {
    claims.notes.push_back("negativity condition not established: positivity not asserted");
  }
  const ProblemSpec& problem = *form.problem;
  bool same = problem.P.dimension() == problem.Q.dimension();
  for (int i = 0; same && i < problem.P.dimension(); ++i) {
    for (int j = i; j < problem.P.dimension(); ++j) {
      if (problem.P.entry(i, j).source() != problem.Q.entry(i, j).source()) same = false;
    }
  }
  if (same && result.self_adjoint) {
    double worst = 0.0;
    const SparseMatrix gram = form.M + form.Gq;
    for (std::size_t i = 0; i < result.eigenfunctions.size(); ++i) {
      for (std::size_t j = i + 1; j < result.eigenfunctions.size(); ++j) {
        worst = std::max(worst, std::abs(result.eigenfunctions[i].coeffs.dot(
                                    gram * result.eigenfunctions[j].coeffs)));
      }
    }
    claims.qh1_orthogonality_max = worst;
  }
  claims.first_eigfn_nonnegative = result.diagnostics.first_eigfn_min >= -1e-6;
  claims.holds = claims.monotone && claims.orthogonal && claims.positive.value_or(true) &&
                 claims.first_eigfn_nonnegative;
  // QH1 orthogonality is only expected for pure P = Q operators (A = Gq).
  if (claims.qh1_orthogonality_max && *claims.qh1_orthogonality_max > 1e-8) {
    claims.notes.push_back("QH1 orthogonality exceeds 1e-8 (expected only without lower-order terms)");
  }
  return claims;
}

ConvergenceTable eigenvalue_convergence(const ProblemSpec& problem, const std::vector<int>& resolutions,
                                        int k) {
  if (resolutions.size() < 3) {
    throw Error(ErrorKind::InvalidRequest, "convergence study needs at least three resolutions");
  }
  ConvergenceTable table;
  for (int n : resolutions) {
    const DiscreteSpace space = build_space(build_mesh(problem, n), problem.bc);
    const AssembledForm form = assemble_form(space, problem);
    const SpectrumResult spectrum = compute_spectrum(form, k);
    table.levels.push_back({n, space.mesh().mesh_size(), spectrum.eigenvalues});
  }
  table.rates.resize(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    for (std::size_t j = 0; j + 2 < table.levels.size(); ++j) {
      const auto& l0 = table.levels[j];
      const auto& l1 = table.levels[j + 1];
      const auto& l2 = table.levels[j + 2];
      const double d1 = std::abs(l0.eigenvalues(i) - l1.eigenvalues(i));
      const double d2 = std::abs(l1.eigenvalues(i) - l2.eigenvalues(i));
      ConvergenceRate rate;
      if (d1 <= 1e-10 && d2 <= 1e-10) {
        rate.exact = true;
      } else if (d1 > 0.0 && d2 > 0.0 && l0.h != l1.h) {
        rate.rate = std::log(d1 / d2) / std::log(l0.h / l1.h);
      }
      table.rates[static_cast<std::size_t>(i)].push_back(rate);
    }
  }
  return table;
}

}  // namespace degell
