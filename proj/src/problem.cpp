#include "degell/problem.hpp"

#include <sstream>

#include "degell/error.hpp"

namespace degell {

const char* to_string(BoundaryKind kind) noexcept {
  return kind == BoundaryKind::Neumann ? "neumann" : "dirichlet";
}

namespace {

void check_tuple(const std::vector<ScalarExpr>& coeffs, const SubunitTuple& fields, int n,
                 const char* coeff_name, const char* field_name) {
  if (coeffs.size() != fields.size()) {
    std::ostringstream os;
    os << "|" << coeff_name << "| = " << coeffs.size() << " but |" << field_name
       << "| = " << fields.size();
    throw Error(ErrorKind::InvalidData, os.str());
  }
  for (const auto& w : fields) {
    if (w.dimension() != n) {
      std::ostringstream os;
      os << field_name << " has a vector field with " << w.dimension()
         << " components in a " << n << "-dimensional problem";
      throw Error(ErrorKind::InvalidData, os.str());
    }
  }
}

}  // namespace

void ProblemSpec::validate() const {
  const int n = dimension();
  if (P.dimension() != n || Q.dimension() != n) {
    throw Error(ErrorKind::InvalidData, "P and Q must match the domain dimension");
  }
  check_tuple(H, R, n, "H", "R");
  check_tuple(G, S, n, "G", "S");
  check_tuple(g, T, n, "g", "T");
  if (!H.empty() && !G.empty() && H.size() != G.size()) {
    throw Error(ErrorKind::InvalidData, "H and G must share the tuple length N");
  }
  if (!(exponents.t > 1.0)) throw Error(ErrorKind::InvalidData, "exponent t must exceed 1");
  if (!(exponents.q > 2.0)) throw Error(ErrorKind::InvalidData, "exponent q must exceed 2");
  if (!(exponents.omega > 1.0) || !(exponents.sigma > 1.0)) {
    throw Error(ErrorKind::InvalidData, "gains omega and sigma must exceed 1");
  }
  if (numerics.trials < 1 || numerics.negativity_trials < 1) {
    throw Error(ErrorKind::InvalidData, "trial counts must be positive");
  }
  if (!(numerics.tol_rank > 0.0)) throw Error(ErrorKind::InvalidData, "tol_rank must be positive");
}

std::vector<std::string> ProblemSpec::exponent_warnings() const {
  const bool neumann = bc == BoundaryKind::Neumann;
  const double gain = neumann ? exponents.omega : exponents.sigma;
  const double conj = gain / (gain - 1.0);
  const char* name = neumann ? "omega'" : "sigma'";
  std::vector<std::string> out;
  std::ostringstream os;
  if (!(exponents.t > conj)) {
    os << "t = " << exponents.t << " does not exceed " << name << " = " << conj;
    out.push_back(os.str());
    os.str("");
  }
  if (!(exponents.q > 2.0 * conj)) {
    os << "q = " << exponents.q << " does not exceed 2" << name << " = " << 2.0 * conj;
    out.push_back(os.str());
  }
  return out;
}

ProblemSpec ProblemSpec::adjoint() const {
  ProblemSpec out = *this;
  std::swap(out.H, out.G);
  std::swap(out.R, out.S);
  return out;
}

ProblemSpec ProblemSpec::homogeneous() const {
  ProblemSpec out = *this;
  out.f = ScalarExpr::constant(0.0);
  out.g.clear();
  out.T.clear();
  return out;
}

Mesh build_mesh(const ProblemSpec& problem, std::optional<int> resolution) {
  const auto& d = problem.domain;
  if (d.kind == DomainSpec::Kind::Interval) {
    return build_interval_mesh(d.x_range[0], d.x_range[1], resolution.value_or(d.nx));
  }
  return build_rect_mesh(d.x_range, d.y_range, resolution.value_or(d.nx), resolution.value_or(d.ny));
}

ProblemSpec laplacian_problem(DomainSpec domain, BoundaryKind bc) {
  ProblemSpec p;
  p.domain = domain;
  p.bc = bc;
  p.P = MatrixField::identity(domain.dimension());
  p.Q = MatrixField::identity(domain.dimension());
  return p;
}

}  // namespace degell
