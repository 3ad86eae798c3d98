#include "degell/dense.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

#include "degell/error.hpp"

namespace degell {

Eigen::MatrixXd to_dense(const Eigen::SparseMatrix<double>& A) { return Eigen::MatrixXd(A); }

EigenPairs symmetric_pencil(const Eigen::MatrixXd& A, const Eigen::MatrixXd& M) {
  const Eigen::MatrixXd sym = 0.5 * (A + A.transpose());
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym, M);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::SingularSystem, "generalized symmetric eigensolver failed");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

double max_abs(const Eigen::SparseMatrix<double>& A) {
  double m = 0.0;
  for (int k = 0; k < A.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(A, k); it; ++it) m = std::max(m, std::abs(it.value()));
  }
  return m;
}

void m_orthonormalize(std::vector<Eigen::VectorXd>& vectors, const Eigen::SparseMatrix<double>& M) {
  std::vector<Eigen::VectorXd> out;
  for (auto v : vectors) {
    const double original = std::sqrt(std::max(v.dot(M * v), 0.0));
    if (original == 0.0) continue;
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : out) v -= q.dot(M * v) * q;
    }
    const double norm = std::sqrt(std::max(v.dot(M * v), 0.0));
    if (norm <= 1e-12 * original) continue;
    out.push_back(v / norm);
  }
  vectors = std::move(out);
}

EigenPairs smallest_pencil_sparse(const Eigen::SparseMatrix<double>& A,
                                  const Eigen::SparseMatrix<double>& M, int count, double shift) {
  const Eigen::Index n = A.rows();
  const int block = static_cast<int>(std::min<Eigen::Index>(n, count + std::max(4, count / 2)));

  Eigen::SparseMatrix<double> shifted = A - shift * M;
  shifted.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(shifted);
  if (lu.info() != Eigen::Success) {
    throw Error(ErrorKind::SingularSystem, "shift-invert factorization failed");
  }

  // Deterministic start: smooth-ish columns cos(j * t) over the index range.
  Eigen::MatrixXd X(n, block);
  for (int j = 0; j < block; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      X(i, j) = std::cos(static_cast<double>(j) * 3.141592653589793 * (static_cast<double>(i) + 0.5) /
                         static_cast<double>(n)) +
                1e-3 * std::sin(static_cast<double>((i + 1) * (j + 7)));
    }
  }

  Eigen::VectorXd previous = Eigen::VectorXd::Constant(count, std::numeric_limits<double>::infinity());
  EigenPairs result;
  for (int sweep = 0; sweep < 500; ++sweep) {
    Eigen::MatrixXd Y(n, block);
    for (int j = 0; j < block; ++j) Y.col(j) = lu.solve(M * X.col(j));

    // Rayleigh-Ritz on span(Y).
    const Eigen::MatrixXd AY = A * Y;
    const Eigen::MatrixXd MY = M * Y;
    Eigen::MatrixXd a = Y.transpose() * AY;
    Eigen::MatrixXd m = Y.transpose() * MY;
    a = 0.5 * (a + a.transpose());
    m = 0.5 * (m + m.transpose());
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> small(a, m);
    if (small.info() != Eigen::Success) {
      throw Error(ErrorKind::SingularSystem, "Rayleigh-Ritz step failed");
    }
    X = Y * small.eigenvectors();
    result.values = small.eigenvalues().head(count);
    const double scale = std::max(1.0, result.values.cwiseAbs().maxCoeff());
    if ((result.values - previous).cwiseAbs().maxCoeff() <= 1e-13 * scale) break;
    previous = result.values;
  }
  result.vectors = X.leftCols(count);
  return result;
}

}  // namespace degell
