#pragma once

#include <cmath>
#include <numbers>
#include <vector>

namespace degell::testing {

// Eigenvalues of the P1 consistent-mass Laplacian on a uniform mesh of (0, L)
// with n cells: the discrete modes are the nodal sines (Dirichlet, k >= 1) or
// cosines (Neumann, k >= 0).
inline double p1_laplacian_eigenvalue(double length, int n, int k) {
  const double h = length / n;
  const double c = std::cos(k * std::numbers::pi * h / length);
  return 6.0 / (h * h) * (1.0 - c) / (2.0 + c);
}

inline std::vector<double> p1_laplacian_eigenvalues(double length, int n, int first, int count) {
  std::vector<double> out;
  for (int k = first; k < first + count; ++k) out.push_back(p1_laplacian_eigenvalue(length, n, k));
  return out;
}

}  // namespace degell::testing
