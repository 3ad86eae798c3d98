#pragma once

#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace degell {

/// Problems up to this many dofs use dense factorizations (SVD, QZ-free
/// generalized eigensolvers); larger ones switch to sparse shift-invert.
inline constexpr int kDenseLimit = 2000;

Eigen::MatrixXd to_dense(const Eigen::SparseMatrix<double>& A);

struct EigenPairs {
  Eigen::VectorXd values;   ///< ascending
  Eigen::MatrixXd vectors;  ///< M-orthonormal columns
};

/// All eigenpairs of the symmetric-definite pencil (A, M), dense.
EigenPairs symmetric_pencil(const Eigen::MatrixXd& A, const Eigen::MatrixXd& M);

/// The `count` smallest eigenpairs of a symmetric pencil (A, M) with M SPD,
/// by block shift-invert subspace iteration around `shift` (which must lie
/// below the wanted eigenvalues). Rayleigh-Ritz on the block each sweep.
EigenPairs smallest_pencil_sparse(const Eigen::SparseMatrix<double>& A,
                                  const Eigen::SparseMatrix<double>& M, int count, double shift);

/// In-place modified Gram-Schmidt (two passes) in the M inner product;
/// vectors that collapse below 1e-12 relative are dropped.
void m_orthonormalize(std::vector<Eigen::VectorXd>& vectors, const Eigen::SparseMatrix<double>& M);

/// Max-abs entry of a sparse matrix.
double max_abs(const Eigen::SparseMatrix<double>& A);

}  // namespace degell
