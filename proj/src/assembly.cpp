#include "degell/assembly.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "degell/dense.hpp"
#include "degell/error.hpp"

namespace degell {

namespace {

using Triplet = Eigen::Triplet<double>;

SmallVector contract(const std::vector<ScalarExpr>& coeffs, const SubunitTuple& fields,
                     const Point& x, int n) {
  SmallVector out = SmallVector::Zero(n);
  for (std::size_t k = 0; k < coeffs.size(); ++k) out += coeffs[k](x) * fields[k](x);
  return out;
}

double euclidean(const std::vector<ScalarExpr>& coeffs, const Point& x) {
  double s = 0.0;
  for (const auto& c : coeffs) s += std::pow(c(x), 2);
  return std::sqrt(s);
}

SparseMatrix from_triplets(int size, const std::vector<Triplet>& triplets) {
  SparseMatrix m(size, size);
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return m;
}

// Per-node kernel of one local matrix entry; `test` and `trial` are local
// vertex indices.
template <typename Kernel>
SparseMatrix assemble_matrix(const DiscreteSpace& space, Kernel&& kernel) {
  const Mesh& mesh = space.mesh();
  const int nv = mesh.vertices_per_cell();
  std::vector<Triplet> triplets;
  triplets.reserve(mesh.cell_count() * static_cast<std::size_t>(nv * nv));
  for (std::size_t c = 0; c < mesh.cell_count(); ++c) {
    const auto& cell = mesh.cell(c);
    const auto nodes = space.quadrature(c);
    for (int a = 0; a < nv; ++a) {
      const int row = space.dof(static_cast<std::size_t>(cell[static_cast<std::size_t>(a)]));
      if (row < 0) continue;
      for (int b = 0; b < nv; ++b) {
        const int col = space.dof(static_cast<std::size_t>(cell[static_cast<std::size_t>(b)]));
        if (col < 0) continue;
        double value = 0.0;
        for (std::size_t q = 0; q < nodes.size(); ++q) {
          value += nodes[q].weight * kernel(c, q, nodes[q], a, b);
        }
        triplets.emplace_back(row, col, value);
      }
    }
  }
  return from_triplets(space.dof_count(), triplets);
}

SparseMatrix assemble_operator(const DiscreteSpace& space, const NodalCoefficients& co) {
  return assemble_matrix(space, [&](std::size_t c, std::size_t q, const QuadratureNode& node, int a, int b) {
    const std::size_t i = NodalCoefficients::index(c, q);
    const SmallVector& grad_test = space.basis_gradient(c, a);
    const SmallVector& grad_trial = space.basis_gradient(c, b);
    const double phi_test = node.basis[static_cast<std::size_t>(a)];
    const double phi_trial = node.basis[static_cast<std::size_t>(b)];
    return grad_test.dot(co.P[i] * grad_trial) + phi_test * co.HR[i].dot(grad_trial) +
           phi_trial * co.GS[i].dot(grad_test) + co.F[i] * phi_trial * phi_test;
  });
}

void check_tuple_subunit(const SubunitTuple& tuple, const char* name, const MatrixField& Q,
                         const std::vector<Point>& samples, int directions,
                         std::vector<std::string>& warnings) {
  for (std::size_t k = 0; k < tuple.size(); ++k) {
    const auto report = check_subunit(tuple[k], Q, samples, std::max(directions, 4));
    if (!report.ok) {
      std::ostringstream os;
      os.precision(6);
      os << name << "[" << k << "] is not subunit with respect to Q (worst ratio "
         << report.worst_ratio << " at x = (" << report.witness->point[0] << ", "
         << report.witness->point[1] << "))";
      warnings.push_back(os.str());
    }
  }
}

AssembledForm assemble_with(const DiscreteSpace& space, const ProblemSpec& problem) {
  problem.validate();
  if (problem.dimension() != space.dimension()) {
    throw Error(ErrorKind::InvalidData, "problem and space dimensions differ");
  }
  const NodalCoefficients co = evaluate_coefficients(space, problem);

  AssembledForm form{.A = assemble_operator(space, co),
                     .M = assemble_mass(space),
                     .Gq = {},
                     .space = space,
                     .problem = std::make_shared<const ProblemSpec>(problem),
                     .warnings = {}};
  form.Gq = assemble_matrix(space, [&](std::size_t c, std::size_t q, const QuadratureNode&, int a, int b) {
    return space.basis_gradient(c, a).dot(co.Q[NodalCoefficients::index(c, q)] * space.basis_gradient(c, b));
  });

  const auto samples = structural_samples(space, problem);
  try {
    const auto cmp = estimate_comparability(problem.P, problem.Q, samples, problem.numerics.directions);
    form.c1_hat = cmp.lower;
    form.C1_hat = cmp.upper;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::ComparabilityViolation) throw;
    form.c1_hat = 0.0;
    form.C1_hat = std::numeric_limits<double>::infinity();
    form.warnings.emplace_back(e.what());
  }
  check_tuple_subunit(problem.R, "R", problem.Q, samples, problem.numerics.directions, form.warnings);
  check_tuple_subunit(problem.S, "S", problem.Q, samples, problem.numerics.directions, form.warnings);
  check_tuple_subunit(problem.T, "T", problem.Q, samples, problem.numerics.directions, form.warnings);
  return form;
}

}  // namespace

NodalCoefficients evaluate_coefficients(const DiscreteSpace& space, const ProblemSpec& problem) {
  const Mesh& mesh = space.mesh();
  const int n = space.dimension();
  const std::size_t count = 3 * mesh.cell_count();
  NodalCoefficients co;
  co.P.reserve(count);
  co.Q.reserve(count);
  co.HR.reserve(count);
  co.GS.reserve(count);
  co.gT.reserve(count);
  for (std::size_t c = 0; c < mesh.cell_count(); ++c) {
    try {
      for (const auto& node : space.quadrature(c)) {
        const Point& x = node.x;
        co.P.push_back(problem.P(x));
        co.Q.push_back(problem.Q(x));
        co.HR.push_back(contract(problem.H, problem.R, x, n));
        co.GS.push_back(contract(problem.G, problem.S, x, n));
        co.gT.push_back(contract(problem.g, problem.T, x, n));
        co.F.push_back(problem.F(x));
        co.f.push_back(problem.f(x));
        co.H_norm.push_back(euclidean(problem.H, x));
        co.G_norm.push_back(euclidean(problem.G, x));
        co.g_norm.push_back(euclidean(problem.g, x));
      }
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Evaluation) throw;
      throw Error(ErrorKind::Evaluation, "cell " + std::to_string(c) + ": " + e.what());
    }
  }
  return co;
}

std::vector<Point> structural_samples(const DiscreteSpace& space, const ProblemSpec& problem) {
  auto samples = space.quadrature_points();
  const auto extra = halton_points(space.mesh().domain(), space.dimension(),
                                   problem.numerics.sample_points, problem.numerics.seed);
  samples.insert(samples.end(), extra.begin(), extra.end());
  return samples;
}

AssembledForm assemble_form(const DiscreteSpace& space, const ProblemSpec& problem) {
  return assemble_with(space, problem);
}

AssembledForm assemble_adjoint(const DiscreteSpace& space, const ProblemSpec& problem) {
  AssembledForm adjoint = assemble_with(space, problem.adjoint());
  const SparseMatrix primal = assemble_with(space, problem).A;
  const SparseMatrix transposed = primal.transpose();
  const double scale = std::max(max_abs(primal), std::numeric_limits<double>::min());
  const double mismatch = max_abs(SparseMatrix(adjoint.A - transposed));
  if (mismatch > 1e-9 * scale) {
    std::ostringstream os;
    os << "adjoint assembly differs from the transpose by " << mismatch / scale << " (relative)";
    throw Error(ErrorKind::TransposeMismatch, os.str());
  }
  return adjoint;
}

Eigen::VectorXd assemble_rhs(const DiscreteSpace& space, const ScalarExpr& f, const SubunitTuple& T,
                             const std::vector<ScalarExpr>& g) {
  if (T.size() != g.size()) {
    throw Error(ErrorKind::InvalidData, "|T| = " + std::to_string(T.size()) +
                                            " but |g| = " + std::to_string(g.size()));
  }
  const Mesh& mesh = space.mesh();
  const int nv = mesh.vertices_per_cell();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(space.dof_count());
  for (std::size_t c = 0; c < mesh.cell_count(); ++c) {
    const auto& cell = mesh.cell(c);
    for (const auto& node : space.quadrature(c)) {
      double fx = 0.0;
      SmallVector gt = SmallVector::Zero(space.dimension());
      try {
        fx = f(node.x);
        for (std::size_t k = 0; k < g.size(); ++k) gt += g[k](node.x) * T[k](node.x);
      } catch (const Error& e) {
        throw Error(ErrorKind::Evaluation, "cell " + std::to_string(c) + ": " + e.what());
      }
      for (int a = 0; a < nv; ++a) {
        const int row = space.dof(static_cast<std::size_t>(cell[static_cast<std::size_t>(a)]));
        if (row < 0) continue;
        b(row) += node.weight * (fx * node.basis[static_cast<std::size_t>(a)] +
                                 gt.dot(space.basis_gradient(c, a)));
      }
    }
  }
  return b;
}

Eigen::VectorXd assemble_rhs(const DiscreteSpace& space, const ProblemSpec& problem) {
  return assemble_rhs(space, problem.f, problem.T, problem.g);
}

SparseMatrix assemble_mass(const DiscreteSpace& space) {
  return assemble_matrix(space, [](std::size_t, std::size_t, const QuadratureNode& node, int a, int b) {
    return node.basis[static_cast<std::size_t>(a)] * node.basis[static_cast<std::size_t>(b)];
  });
}

SparseMatrix assemble_gram(const DiscreteSpace& space, const MatrixField& Q) {
  std::vector<SmallMatrix> q;
  for (std::size_t c = 0; c < space.mesh().cell_count(); ++c) {
    for (const auto& node : space.quadrature(c)) q.push_back(Q(node.x));
  }
  return assemble_matrix(space, [&](std::size_t c, std::size_t k, const QuadratureNode&, int a, int b) {
    return space.basis_gradient(c, a).dot(q[NodalCoefficients::index(c, k)] * space.basis_gradient(c, b));
  });
}

std::vector<std::array<double, 3>> subunit_derivative(const DiscreteSpace& space, const VectorField& W,
                                                      const WeakSolution& u) {
  std::vector<std::array<double, 3>> out(space.mesh().cell_count());
  for (std::size_t c = 0; c < space.mesh().cell_count(); ++c) {
    const auto nodes = space.quadrature(c);
    for (std::size_t q = 0; q < nodes.size(); ++q) out[c][q] = W(nodes[q].x).dot(u.gradient[c]);
  }
  return out;
}

double nodal_l2_norm(const DiscreteSpace& space, const std::vector<std::array<double, 3>>& values) {
  return std::sqrt(space.integrate([&](std::size_t c, const QuadratureNode& node) {
    const auto q = static_cast<std::size_t>(&node - space.quadrature(c).data());
    return values[c][q] * values[c][q];
  }));
}

double qh1_norm(const AssembledForm& form, const Eigen::VectorXd& coeffs) {
  return std::sqrt(std::max(coeffs.dot(form.M * coeffs) + coeffs.dot(form.Gq * coeffs), 0.0));
}

double l2_norm(const AssembledForm& form, const Eigen::VectorXd& coeffs) {
  return std::sqrt(std::max(coeffs.dot(form.M * coeffs), 0.0));
}

double nodal_lp_norm(const DiscreteSpace& space, const std::vector<double>& nodal, double p) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : nodal) m = std::max(m, std::abs(v));
    return m;
  }
  const double integral = space.integrate([&](std::size_t c, const QuadratureNode& node) {
    const auto q = static_cast<std::size_t>(&node - space.quadrature(c).data());
    return std::pow(std::abs(nodal[NodalCoefficients::index(c, q)]), p);
  });
  return std::pow(integral, 1.0 / p);
}

double data_norm(const DiscreteSpace& space, const ProblemSpec& problem) {
  std::vector<double> f;
  std::vector<double> g;
  for (std::size_t c = 0; c < space.mesh().cell_count(); ++c) {
    for (const auto& node : space.quadrature(c)) {
      f.push_back(problem.f(node.x));
      g.push_back(euclidean(problem.g, node.x));
    }
  }
  return nodal_lp_norm(space, f, 2.0) +
         std::sqrt(static_cast<double>(problem.g.size())) * nodal_lp_norm(space, g, 2.0);
}

bool coefficients_self_adjoint(const DiscreteSpace& space, const ProblemSpec& problem, double tol) {
  const int n = space.dimension();
  for (const auto& x : space.quadrature_points()) {
    const SmallVector hr = contract(problem.H, problem.R, x, n);
    const SmallVector gs = contract(problem.G, problem.S, x, n);
    if ((hr - gs).cwiseAbs().maxCoeff() > tol * std::max(1.0, std::max(hr.norm(), gs.norm()))) {
      return false;
    }
  }
  return true;
}

bool is_symmetric(const SparseMatrix& A, double rel_tol) {
  const double scale = max_abs(A);
  if (scale == 0.0) return true;
  const SparseMatrix diff = A - SparseMatrix(A.transpose());
  return max_abs(diff) <= rel_tol * scale;
}

std::vector<Eigen::VectorXd> trial_vectors(int size, int trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Eigen::VectorXd> out;
  out.reserve(static_cast<std::size_t>(trials) + 1);
  out.push_back(Eigen::VectorXd::Ones(size));
  for (int t = 0; t < trials; ++t) {
    Eigen::VectorXd v(size);
    for (Eigen::Index i = 0; i < size; ++i) v(i) = normal(rng);
    out.push_back(std::move(v));
  }
  return out;
}

BoundednessReport check_boundedness(const AssembledForm& form, int trials, std::uint64_t seed,
                                    std::optional<double> poincare_constant) {
  if (trials < 1) throw Error(ErrorKind::InvalidRequest, "boundedness check needs trials >= 1");
  const auto us = trial_vectors(form.size(), trials, seed);
  const auto vs = trial_vectors(form.size(), trials, seed + 1);
  BoundednessReport report;
  for (std::size_t t = 0; t < us.size(); ++t) {
    const double nu = qh1_norm(form, us[t]);
    const double nv = qh1_norm(form, vs[t]);
    if (nu == 0.0 || nv == 0.0) continue;
    report.empirical = std::max(report.empirical, std::abs(us[t].dot(form.A * vs[t])) / (nu * nv));
  }

  const auto& problem = *form.problem;
  const auto C4 = poincare_constant ? poincare_constant : problem.numerics.poincare_constant;
  if (C4) {
    const NodalCoefficients co = evaluate_coefficients(form.space, problem);
    const double omega = problem.exponents.omega;
    const double conj = omega / (omega - 1.0);
    const double N = static_cast<double>(problem.drift_count());
    const double drift = nodal_lp_norm(form.space, co.G_norm, 2.0 * conj) +
                         nodal_lp_norm(form.space, co.H_norm, 2.0 * conj);
    report.formula = form.C1_hat * form.C1_hat + *C4 * std::sqrt(N) * drift +
                     *C4 * *C4 * nodal_lp_norm(form.space, co.F, conj);
  }
  return report;
}

std::vector<Eigen::VectorXd> coercivity_candidates(const AssembledForm& form, int trials,
                                                   std::uint64_t seed) {
  auto candidates = trial_vectors(form.size(), trials, seed);
  if (form.size() > 0 && form.size() <= kDenseLimit && std::isfinite(form.c1_hat)) {
    // The maximizer of ((c1/4)(M+Gq) - sym A) relative to M is the exact
    // discrete worst case.
    const Eigen::MatrixXd M = to_dense(form.M);
    const Eigen::MatrixXd K = (form.c1_hat / 4.0) * (M + to_dense(form.Gq)) - to_dense(form.A);
    const auto pairs = symmetric_pencil(K, M);
    candidates.push_back(pairs.vectors.col(pairs.vectors.cols() - 1));
  }
  return candidates;
}

CoercivityReport check_coercivity(const AssembledForm& form, int trials, std::uint64_t seed) {
  if (trials < 1) throw Error(ErrorKind::InvalidRequest, "coercivity check needs trials >= 1");
  const double quarter = form.c1_hat / 4.0;
  const auto candidates = coercivity_candidates(form, trials, seed);

  CoercivityReport report;
  double worst = 0.0;
  for (const auto& u : candidates) {
    const double l2sq = u.dot(form.M * u);
    if (l2sq < 1e-14) {
      report.warning = "trial vector with vanishing L2 norm skipped";
      continue;
    }
    const double qh1sq = l2sq + u.dot(form.Gq * u);
    worst = std::max(worst, (quarter * qh1sq - u.dot(form.A * u)) / l2sq);
  }
  report.l2_shift = worst;
  if (!std::isfinite(worst) || worst > 1e14) {
    report.warning = "coercivity shift is not finite";
  }
  return report;
}

}  // namespace degell
