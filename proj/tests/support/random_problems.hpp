#pragma once

#include <random>
#include <sstream>
#include <string>

#include "degell/problem.hpp"

namespace degell::testing {

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

inline ScalarExpr ex(const std::string& s) { return ScalarExpr::parse(s); }

/// Seeded random 2D operator on (-1, 1)^2. Q is positive semidefinite at
/// every point; R, S, T are subunit with respect to Q by construction.
/// With `self_adjoint` the drift pairs are chosen so that H.R == G.S.
inline ProblemSpec random_problem(std::mt19937_64& rng, bool self_adjoint, int n = 6) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> sym(-1.0, 1.0);
  ProblemSpec p;
  p.domain.kind = DomainSpec::Kind::Rect;
  p.domain.x_range = {-1.0, 1.0};
  p.domain.y_range = {-1.0, 1.0};
  p.domain.nx = n;
  p.domain.ny = n;
  p.bc = unit(rng) < 0.5 ? BoundaryKind::Neumann : BoundaryKind::Dirichlet;

  // Q = [[1 + a x^2, d], [d, 0.5 + c y^2]] with |d| <= 0.3 stays >= 0.2 I.
  const double a = unit(rng);
  const double c = unit(rng);
  const double d = 0.3 * sym(rng);
  const std::string q11 = "1 + " + fmt(a) + "*x^2";
  const std::string q22 = "0.5 + " + fmt(c) + "*y^2";
  p.Q = MatrixField::from_upper(2, {ex(q11), ex(fmt(d)), ex(q22)});
  const double s = 0.5 + 1.5 * unit(rng);
  p.P = MatrixField::from_upper(2, {ex(fmt(s) + "*(" + q11 + ")"), ex(fmt(s * d)),
                                    ex(fmt(s) + "*(" + q22 + ")")});

  // |W| <= 0.4 < sqrt(0.2) keeps W subunit.
  auto subunit = [&]() {
    const double t = 0.4 * unit(rng);
    const double theta = 6.283185307179586 * unit(rng);
    const double k = 1.0 + 2.0 * unit(rng);
    return VectorField({ex(fmt(t) + "*cos(" + fmt(theta) + " + " + fmt(k) + "*x*y)"),
                        ex(fmt(t) + "*sin(" + fmt(theta) + " + " + fmt(k) + "*x*y)")});
  };
  auto coefficient = [&]() {
    return ex(fmt(sym(rng)) + " + " + fmt(sym(rng)) + "*x + " + fmt(sym(rng)) + "*sin(y)");
  };
  const int N = 1 + static_cast<int>(unit(rng) * 2.0);
  for (int k = 0; k < N; ++k) {
    p.H.push_back(coefficient());
    p.R.push_back(subunit());
  }
  if (self_adjoint) {
    p.G = p.H;
    p.S = p.R;
  } else {
    for (int k = 0; k < N; ++k) {
      p.G.push_back(coefficient());
      p.S.push_back(subunit());
    }
  }
  p.F = ex(fmt(2.0 * unit(rng)) + " + " + fmt(sym(rng)) + "*x*y");
  p.f = ex(fmt(sym(rng)) + " + cos(" + fmt(3.0 * unit(rng)) + "*x)");
  p.g = {coefficient()};
  p.T = {subunit()};
  p.numerics.trials = 60;
  p.numerics.negativity_trials = 60;
  return p;
}

}  // namespace degell::testing
