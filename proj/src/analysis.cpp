#include "degell/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "degell/dense.hpp"
#include "degell/error.hpp"

namespace degell {

namespace {

constexpr double kProductFloor = 1e-14;
constexpr double kUnboundedQuotient = 1e6;

Eigen::VectorXd random_vertex_values(std::mt19937_64& rng, std::size_t count) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd v(static_cast<Eigen::Index>(count));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = normal(rng);
  return v;
}

void zero_boundary(const Mesh& mesh, Eigen::VectorXd& v) {
  for (std::size_t b : mesh.boundary_vertices()) v(static_cast<Eigen::Index>(b)) = 0.0;
}

bool is_first_condition(NegativityCondition which) {
  return which == NegativityCondition::Cond1I || which == NegativityCondition::Cond1II;
}

bool uses_gs(NegativityCondition which) {
  return which == NegativityCondition::Cond1I || which == NegativityCondition::Cond2I;
}

NegativityIntegral integrate_pair(const DiscreteSpace& space, const NodalCoefficients& co, bool gs,
                                  const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  NegativityIntegral out;
  for (std::size_t c = 0; c < space.mesh().cell_count(); ++c) {
    const auto nodes = space.quadrature(c);
    for (std::size_t q = 0; q < nodes.size(); ++q) {
      const auto& node = nodes[q];
      const std::size_t idx = NodalCoefficients::index(c, q);
      const double uq = space.value_at(c, node, u);
      const double vq = space.value_at(c, node, v);
      const SmallVector grad = product_gradient(space, c, node, u, v);
      const SmallVector& drift = gs ? co.GS[idx] : co.HR[idx];
      out.value += node.weight * (co.F[idx] * uq * vq + drift.dot(grad));
      out.product += node.weight * uq * vq;
    }
  }
  return out;
}

// Zero-mean part of a vertex function on a Neumann space.
Eigen::VectorXd remove_mean(const SparseMatrix& M, const Eigen::VectorXd& w) {
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(w.size());
  const double mean = ones.dot(M * w) / ones.dot(M * ones);
  return w - mean * ones;
}

EigenPairs smallest_pairs(const SparseMatrix& Gq, const SparseMatrix& M, int count) {
  const int n = static_cast<int>(Gq.rows());
  count = std::min(count, n);
  if (n <= kDenseLimit) {
    EigenPairs all = symmetric_pencil(to_dense(Gq), to_dense(M));
    return {all.values.head(count), all.vectors.leftCols(count)};
  }
  const double shift = -std::max(1e-3, 1e-3 * max_abs(Gq) / std::max(max_abs(M), 1e-300));
  return smallest_pencil_sparse(Gq, M, count, shift);
}

struct QuotientTracker {
  InequalityReport& report;
  void consider(double quotient, const std::string& label, const Eigen::VectorXd& w) {
    ++report.trials;
    if (!report.witness || quotient > report.constant) {
      report.constant = quotient;
      report.witness = Witness{label, w, {}, quotient};
    }
    if (quotient > kUnboundedQuotient) report.holds = false;
  }
};

std::vector<SmallMatrix> nodal_matrix(const DiscreteSpace& space, const MatrixField& Q) {
  std::vector<SmallMatrix> out;
  out.reserve(space.mesh().cell_count() * 3);
  for (const auto& x : space.quadrature_points()) out.push_back(Q(x));
  return out;
}

}  // namespace

const char* to_string(NegativityCondition which) noexcept {
  switch (which) {
    case NegativityCondition::Cond1I: return "cond1_i";
    case NegativityCondition::Cond1II: return "cond1_ii";
    case NegativityCondition::Cond2I: return "cond2_i";
    case NegativityCondition::Cond2II: return "cond2_ii";
  }
  return "unknown";
}

std::optional<NegativityCondition> parse_negativity_condition(std::string_view text) {
  for (auto c : {NegativityCondition::Cond1I, NegativityCondition::Cond1II, NegativityCondition::Cond2I,
                 NegativityCondition::Cond2II}) {
    if (text == to_string(c)) return c;
  }
  return std::nullopt;
}

SmallVector product_gradient(const DiscreteSpace& space, std::size_t cell, const QuadratureNode& node,
                             const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  return space.value_at(cell, node, u) * space.cell_gradient(cell, v) +
         space.value_at(cell, node, v) * space.cell_gradient(cell, u);
}

NegativityIntegral negativity_integral(const DiscreteSpace& space, const ProblemSpec& problem,
                                       NegativityCondition which, const Eigen::VectorXd& u,
                                       const Eigen::VectorXd& v) {
  const NodalCoefficients co = evaluate_coefficients(space, problem);
  return integrate_pair(space, co, uses_gs(which), u, v);
}

InequalityReport check_negativity(const ProblemSpec& problem, const DiscreteSpace& space,
                                  NegativityCondition which, int trials, std::uint64_t seed) {
  if (trials < 1) throw Error(ErrorKind::InvalidRequest, "negativity check needs at least one trial");
  const Mesh& mesh = space.mesh();
  const NodalCoefficients co = evaluate_coefficients(space, problem);
  const bool first = is_first_condition(which);
  const bool gs = uses_gs(which);

  InequalityReport report;
  report.name = to_string(which);
  report.seed = seed;
  report.constant = std::numeric_limits<double>::infinity();

  int skipped = 0;
  auto consider = [&](const Eigen::VectorXd& u, const Eigen::VectorXd& v, const std::string& label) {
    const NegativityIntegral I = integrate_pair(space, co, gs, u, v);
    if (I.product < kProductFloor) {
      ++skipped;
      return;
    }
    ++report.trials;
    const double score = first ? I.value / I.product : I.value;
    if (score < report.constant) {
      report.constant = score;
      report.witness = Witness{label, u, v, score};
    }
  };

  std::mt19937_64 rng(seed);
  const std::size_t vertices = mesh.vertex_count();
  constexpr int kTruncationSources = 20;
  constexpr std::array<double, 3> kQuantiles{0.25, 0.5, 0.75};
  for (int t = 0; t < trials; ++t) {
    Eigen::VectorXd u = random_vertex_values(rng, vertices);
    Eigen::VectorXd v = random_vertex_values(rng, vertices).cwiseAbs();
    if (!first) {
      zero_boundary(mesh, u);
      zero_boundary(mesh, v);
    }
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      v(i) = u(i) > 0.0 ? v(i) : (u(i) < 0.0 ? -v(i) : 0.0);
    }
    consider(u, v, "random pair " + std::to_string(t));

    if (t < kTruncationSources) {
      std::vector<double> positive;
      for (Eigen::Index i = 0; i < u.size(); ++i) {
        if (u(i) > 0.0) positive.push_back(u(i));
      }
      if (positive.empty()) continue;
      std::sort(positive.begin(), positive.end());
      for (double quantile : kQuantiles) {
        const double k = positive[static_cast<std::size_t>(quantile * static_cast<double>(positive.size() - 1))];
        const Eigen::VectorXd w = (u.array() - k).max(0.0).matrix();
        std::ostringstream label;
        label << "truncation pair " << t << " at level " << k;
        consider(u, w, label.str());
      }
    }
  }
  if (report.trials == 0) {
    throw Error(ErrorKind::DegenerateSampling, "every sampled pair had int uv below 1e-14");
  }
  report.holds = first ? report.constant > 0.0 : report.constant >= -1e-10;
  report.extras["skipped"] = skipped;
  return report;
}

UniquenessReport verify_uniqueness(const ProblemSpec& problem, const DiscreteSpace& space) {
  if (space.bc() != BoundaryKind::Neumann) {
    throw Error(ErrorKind::Precondition, "uniqueness check runs on the Neumann problem");
  }
  UniquenessReport report;
  const auto& numerics = problem.numerics;
  for (auto which : {NegativityCondition::Cond1I, NegativityCondition::Cond1II}) {
    const auto neg = check_negativity(problem, space, which, numerics.negativity_trials, numerics.seed);
    if (neg.holds) {
      report.precondition_met = true;
      report.epsilon = neg.constant;
      report.notes.push_back(std::string("negativity condition ") + to_string(which) + " holds");
      break;
    }
  }
  if (!report.precondition_met) {
    report.notes.push_back("negativity condition 1 fails; check skipped");
    return report;
  }
  const ProblemSpec homogeneous = problem.homogeneous();
  const FredholmOutcome outcome = solve_neumann(homogeneous, space);
  report.branch = outcome.branch;
  if (outcome.solution) {
    const SparseMatrix M = assemble_mass(space);
    const auto& u = outcome.solution->coeffs;
    report.solution_norm = std::sqrt(std::max(u.dot(M * u), 0.0));
  }
  report.holds = outcome.branch == Branch::Unique && report.solution_norm <= 1e-10;
  if (!report.holds) {
    for (const auto& w : problem.exponent_warnings()) report.notes.push_back(w);
    report.notes.push_back("homogeneous problem admits a nonzero solution");
  }
  return report;
}

MaxPrincipleReport verify_max_principle(const ProblemSpec& problem, const DiscreteSpace& space,
                                        const Eigen::VectorXd& u) {
  const Mesh& mesh = space.mesh();
  if (static_cast<std::size_t>(u.size()) != mesh.vertex_count()) {
    throw Error(ErrorKind::InvalidInput, "candidate must hold one value per mesh vertex");
  }
  const DiscreteSpace full = build_space(mesh, BoundaryKind::Neumann);
  const AssembledForm form = assemble_form(full, problem);
  const Eigen::VectorXd Au = form.A * u;
  const double u_scale = std::max(1.0, u.cwiseAbs().maxCoeff());
  const double a_scale = form.A.size() ? max_abs(form.A) : 0.0;
  const double residual_tol = 1e-10 * std::max(1.0, a_scale * u_scale);

  MaxPrincipleReport report;
  report.subsolution_residual_max = -std::numeric_limits<double>::infinity();
  std::vector<std::size_t> offending;
  double interior_max = -std::numeric_limits<double>::infinity();
  double boundary_max = -std::numeric_limits<double>::infinity();
  for (std::size_t v = 0; v < mesh.vertex_count(); ++v) {
    const auto i = static_cast<Eigen::Index>(v);
    if (mesh.is_boundary(v)) {
      boundary_max = std::max(boundary_max, u(i));
      continue;
    }
    interior_max = std::max(interior_max, u(i));
    report.subsolution_residual_max = std::max(report.subsolution_residual_max, Au(i));
    if (Au(i) > residual_tol) offending.push_back(v);
  }
  if (!offending.empty()) {
    std::ostringstream os;
    os << "not a discrete subsolution at " << offending.size() << " vertices:";
    for (std::size_t k = 0; k < std::min<std::size_t>(offending.size(), 20); ++k) os << ' ' << offending[k];
    if (offending.size() > 20) os << " ...";
    throw Error(ErrorKind::InvalidInput, os.str());
  }
  const auto neg = check_negativity(problem, space, NegativityCondition::Cond2I,
                                    problem.numerics.negativity_trials, problem.numerics.seed);
  if (!neg.holds) {
    throw Error(ErrorKind::Precondition, "negativity condition cond2_i fails for this operator");
  }
  report.interior_max = interior_max;
  report.boundary_max_positive = std::max(0.0, boundary_max);
  report.tolerance = 1e-8 * u_scale;
  report.holds = interior_max <= report.boundary_max_positive + report.tolerance;
  return report;
}

std::vector<double> nodal_values(const DiscreteSpace& space, const Eigen::VectorXd& vertex_values) {
  std::vector<double> out;
  out.reserve(space.mesh().cell_count() * 3);
  for (std::size_t c = 0; c < space.mesh().cell_count(); ++c) {
    for (const auto& node : space.quadrature(c)) out.push_back(space.value_at(c, node, vertex_values));
  }
  return out;
}

std::vector<double> degenerate_gradient_squared(const DiscreteSpace& space, const MatrixField& Q,
                                                const Eigen::VectorXd& vertex_values) {
  std::vector<double> out;
  out.reserve(space.mesh().cell_count() * 3);
  for (std::size_t c = 0; c < space.mesh().cell_count(); ++c) {
    const SmallVector g = space.cell_gradient(c, vertex_values);
    for (const auto& node : space.quadrature(c)) out.push_back(g.dot(Q(node.x) * g));
  }
  return out;
}

InequalityReport estimate_global_poincare(const DiscreteSpace& space, const MatrixField& Q, double r,
                                          double gain, int trials, std::uint64_t seed) {
  if (space.bc() != BoundaryKind::Neumann) {
    throw Error(ErrorKind::Precondition, "global Poincare estimate runs on a Neumann space");
  }
  if (!(r >= 2.0)) throw Error(ErrorKind::InvalidRequest, "Poincare exponent r must be at least 2");
  const SparseMatrix M = assemble_mass(space);
  const SparseMatrix Gq = assemble_gram(space, Q);
  const EigenPairs pairs = smallest_pairs(Gq, M, 11);
  if (pairs.values.size() < 2 || pairs.values(1) < 1e-12) {
    throw Error(ErrorKind::NoPoincare,
                "second eigenvalue of the degenerate Gram pencil vanishes; Q disconnects the domain");
  }
  const double mu2 = pairs.values(1);

  InequalityReport report;
  report.name = "global_poincare";
  report.seed = seed;
  report.extras["r"] = r;
  report.extras["mu2"] = mu2;
  if (r > 2.0 * gain) {
    std::ostringstream os;
    os << "r = " << r << " exceeds twice the declared gain " << gain;
    report.notes.push_back(os.str());
  }

  auto quotient = [&](const Eigen::VectorXd& w, double& lhs, double& rhs) {
    const Eigen::VectorXd z = remove_mean(M, w);
    lhs = nodal_lp_norm(space, nodal_values(space, z), r);
    rhs = std::sqrt(std::max(z.dot(Gq * z), 0.0));
  };

  double best = 0.0;
  QuotientTracker tracker{report};
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Eigen::Index modes = pairs.vectors.cols();
  auto consider = [&](const Eigen::VectorXd& w, const std::string& label) {
    double lhs = 0.0;
    double rhs = 0.0;
    quotient(w, lhs, rhs);
    if (rhs < 1e-14) {
      if (lhs > 1e-12) tracker.consider(std::numeric_limits<double>::infinity(), label, w);
      return;
    }
    best = std::max(best, lhs / rhs);
    tracker.consider(lhs / rhs, label, w);
  };
  for (Eigen::Index k = 1; k < modes; ++k) consider(pairs.vectors.col(k), "eigenfunction " + std::to_string(k + 1));
  for (int t = 0; t < trials; ++t) {
    if (t % 2 == 0) {
      consider(random_vertex_values(rng, space.mesh().vertex_count()), "random function " + std::to_string(t));
    } else {
      Eigen::VectorXd w = Eigen::VectorXd::Zero(pairs.vectors.rows());
      for (Eigen::Index k = 1; k < modes; ++k) w += normal(rng) * pairs.vectors.col(k);
      consider(w, "random mode mixture " + std::to_string(t));
    }
  }
  report.extras["max_trial_quotient"] = best;
  if (r == 2.0) {
    report.constant = 1.0 / std::sqrt(mu2);
    report.lower_bound = false;
  } else {
    report.lower_bound = true;
    report.notes.push_back("sampled lower bound on the optimal constant");
  }
  return report;
}

InequalityReport estimate_global_sobolev(const DiscreteSpace& space, const MatrixField& Q, double sigma,
                                         int trials, std::uint64_t seed) {
  if (space.bc() != BoundaryKind::Dirichlet) {
    throw Error(ErrorKind::Precondition, "global Sobolev estimate runs on a Dirichlet space");
  }
  if (!(sigma > 1.0)) throw Error(ErrorKind::InvalidRequest, "Sobolev gain sigma must exceed 1");
  if (space.dof_count() == 0) throw Error(ErrorKind::InvalidRequest, "Dirichlet space has no dofs");
  const SparseMatrix M = assemble_mass(space);
  const SparseMatrix Gq = assemble_gram(space, Q);
  const EigenPairs pairs = smallest_pairs(Gq, M, 10);
  if (pairs.values(0) < 1e-12) {
    throw Error(ErrorKind::NoPoincare, "degenerate Gram matrix is singular on the Dirichlet space");
  }
  const double p = 2.0 * sigma;

  InequalityReport report;
  report.name = "global_sobolev";
  report.seed = seed;
  report.lower_bound = true;
  report.extras["sigma"] = sigma;
  report.extras["lambda1"] = pairs.values(0);
  report.notes.push_back("sampled lower bound on the optimal constant");
  QuotientTracker tracker{report};

  auto consider = [&](const Eigen::VectorXd& coeffs, const std::string& label) {
    const double rhs = std::sqrt(std::max(coeffs.dot(Gq * coeffs), 0.0));
    const Eigen::VectorXd w = space.to_vertex_values(coeffs);
    const double lhs = nodal_lp_norm(space, nodal_values(space, w), p);
    if (rhs < 1e-14) {
      if (lhs > 1e-12) tracker.consider(std::numeric_limits<double>::infinity(), label, w);
      return;
    }
    tracker.consider(lhs / rhs, label, w);
  };
  for (Eigen::Index k = 0; k < pairs.vectors.cols(); ++k) {
    consider(pairs.vectors.col(k), "eigenfunction " + std::to_string(k + 1));
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int t = 0; t < trials; ++t) {
    Eigen::VectorXd c(space.dof_count());
    if (t % 2 == 0) {
      for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = normal(rng);
    } else {
      c.setZero();
      for (Eigen::Index k = 0; k < pairs.vectors.cols(); ++k) c += normal(rng) * pairs.vectors.col(k);
    }
    consider(c, "random function " + std::to_string(t));
  }
  return report;
}

InequalityReport estimate_local_poincare(const DiscreteSpace& space, const MatrixField& Q,
                                         const std::vector<Ball>& balls, double beta, int trials,
                                         std::uint64_t seed, const std::vector<Eigen::VectorXd>& extra) {
  if (!(beta >= 1.0)) throw Error(ErrorKind::InvalidRequest, "dilation beta must be at least 1");
  if (balls.empty()) throw Error(ErrorKind::InvalidRequest, "local Poincare estimate needs a ball");
  const Mesh& mesh = space.mesh();
  const Box& box = mesh.domain();
  const int dim = mesh.dimension();
  constexpr double kSlack = 1e-12;
  for (const auto& ball : balls) {
    const double reach = beta * ball.radius;
    bool inside = ball.radius > 0.0 && ball.center[0] - reach >= box.x0 - kSlack &&
                  ball.center[0] + reach <= box.x1 + kSlack;
    if (dim == 2) {
      inside = inside && ball.center[1] - reach >= box.y0 - kSlack && ball.center[1] + reach <= box.y1 + kSlack;
    }
    if (!inside) {
      std::ostringstream os;
      os << "dilated ball (center " << ball.center[0];
      if (dim == 2) os << ", " << ball.center[1];
      os << ", radius " << reach << ") is not contained in the domain";
      throw Error(ErrorKind::InvalidBall, os.str());
    }
  }
  for (const auto& w : extra) {
    if (static_cast<std::size_t>(w.size()) != mesh.vertex_count()) {
      throw Error(ErrorKind::InvalidInput, "test function must hold one value per mesh vertex");
    }
  }

  const auto points = space.quadrature_points();
  const auto Qn = nodal_matrix(space, Q);
  std::vector<double> weights;
  for (std::size_t c = 0; c < mesh.cell_count(); ++c) {
    for (const auto& node : space.quadrature(c)) weights.push_back(node.weight);
  }
  auto distance = [&](const Point& x, const Point& c) {
    const double dx = x[0] - c[0];
    const double dy = dim == 2 ? x[1] - c[1] : 0.0;
    return std::sqrt(dx * dx + dy * dy);
  };

  std::vector<Eigen::VectorXd> functions;
  std::vector<std::string> labels;
  for (std::size_t k = 0; k < extra.size(); ++k) {
    functions.push_back(extra[k]);
    labels.push_back("supplied function " + std::to_string(k));
  }
  for (int axis = 0; axis < dim; ++axis) {
    Eigen::VectorXd w(static_cast<Eigen::Index>(mesh.vertex_count()));
    for (std::size_t v = 0; v < mesh.vertex_count(); ++v) w(static_cast<Eigen::Index>(v)) = mesh.vertex(v)[static_cast<std::size_t>(axis)];
    functions.push_back(std::move(w));
    labels.push_back(axis == 0 ? "coordinate x" : "coordinate y");
  }
  std::mt19937_64 rng(seed);
  for (int t = 0; t < trials; ++t) {
    functions.push_back(random_vertex_values(rng, mesh.vertex_count()));
    labels.push_back("random function " + std::to_string(t));
  }

  InequalityReport report;
  report.name = "local_poincare";
  report.seed = seed;
  report.lower_bound = true;
  report.extras["beta"] = beta;
  report.notes.push_back("sampled lower bound on the optimal constant");
  QuotientTracker tracker{report};

  for (std::size_t b = 0; b < balls.size(); ++b) {
    const Ball& ball = balls[b];
    std::vector<std::size_t> inner;
    std::vector<std::size_t> outer;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const double d = distance(points[i], ball.center);
      if (d <= ball.radius) inner.push_back(i);
      if (d <= beta * ball.radius) outer.push_back(i);
    }
    if (inner.empty()) {
      throw Error(ErrorKind::InvalidBall, "ball " + std::to_string(b) + " contains no quadrature node");
    }
    for (std::size_t f = 0; f < functions.size(); ++f) {
      const auto values = nodal_values(space, functions[f]);
      double w_sum = 0.0;
      double mean = 0.0;
      for (std::size_t i : inner) {
        w_sum += weights[i];
        mean += weights[i] * values[i];
      }
      mean /= w_sum;
      double lhs = 0.0;
      for (std::size_t i : inner) lhs += weights[i] * (values[i] - mean) * (values[i] - mean);
      lhs = std::sqrt(lhs / w_sum);

      double outer_w = 0.0;
      double rhs = 0.0;
      for (std::size_t i : outer) {
        const SmallVector g = space.cell_gradient(i / 3, functions[f]);
        outer_w += weights[i];
        rhs += weights[i] * g.dot(Qn[i] * g);
      }
      rhs = std::sqrt(std::max(rhs, 0.0) / outer_w);
      const std::string label = labels[f] + " on ball " + std::to_string(b);
      if (rhs < 1e-14) {
        if (lhs > 1e-12) tracker.consider(std::numeric_limits<double>::infinity(), label, functions[f]);
        continue;
      }
      tracker.consider(lhs / (ball.radius * rhs), label, functions[f]);
    }
  }
  return report;
}

}  // namespace degell
