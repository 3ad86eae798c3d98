#include "degell/fields.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "degell/error.hpp"

namespace degell {

namespace {

constexpr double kFormFloor = 1e-14;

std::size_t upper_index(int n, int i, int j) {
  if (i > j) std::swap(i, j);
  return n == 1 ? 0 : static_cast<std::size_t>(i == 0 ? j : 2);
}

double quadratic_form(const SmallMatrix& m, const SmallVector& xi) { return xi.dot(m * xi); }

std::string describe(const Point& p, const SmallVector& xi) {
  std::ostringstream os;
  os.precision(12);
  os << "x = (" << p[0] << ", " << p[1] << "), xi = (" << xi(0);
  if (xi.size() > 1) os << ", " << xi(1);
  os << ")";
  return os.str();
}

}  // namespace

MatrixField MatrixField::identity(int n) {
  return n == 1 ? from_upper(1, {ScalarExpr::constant(1.0)})
                : from_upper(2, {ScalarExpr::constant(1.0), ScalarExpr::constant(0.0),
                                 ScalarExpr::constant(1.0)});
}

MatrixField MatrixField::zero(int n) {
  return n == 1 ? from_upper(1, {ScalarExpr::constant(0.0)})
                : from_upper(2, {ScalarExpr::constant(0.0), ScalarExpr::constant(0.0),
                                 ScalarExpr::constant(0.0)});
}

MatrixField MatrixField::from_upper(int n, std::vector<ScalarExpr> upper) {
  if ((n != 1 && n != 2) || upper.size() != static_cast<std::size_t>(n * (n + 1) / 2)) {
    throw Error(ErrorKind::InvalidData, "matrix field needs n in {1,2} and n(n+1)/2 entries");
  }
  MatrixField field;
  field.n_ = n;
  field.upper_ = std::move(upper);
  return field;
}

MatrixField MatrixField::diagonal(std::vector<ScalarExpr> diag) {
  if (diag.size() == 1) return from_upper(1, std::move(diag));
  if (diag.size() == 2) return from_upper(2, {diag[0], ScalarExpr::constant(0.0), diag[1]});
  throw Error(ErrorKind::InvalidData, "diagonal matrix field needs 1 or 2 entries");
}

const ScalarExpr& MatrixField::entry(int i, int j) const { return upper_[upper_index(n_, i, j)]; }

SmallMatrix MatrixField::operator()(const Point& p) const {
  SmallMatrix m(n_, n_);
  if (n_ == 1) {
    m(0, 0) = upper_[0](p);
  } else {
    m(0, 0) = upper_[0](p);
    m(0, 1) = m(1, 0) = upper_[1](p);
    m(1, 1) = upper_[2](p);
  }
  return m;
}

SmallVector VectorField::operator()(const Point& p) const {
  SmallVector v(dimension());
  for (int i = 0; i < dimension(); ++i) v(i) = components_[static_cast<std::size_t>(i)](p);
  return v;
}

std::vector<SmallVector> sample_directions(int dimension, int count) {
  std::vector<SmallVector> dirs;
  if (dimension == 1) {
    SmallVector plus(1), minus(1);
    plus << 1.0;
    minus << -1.0;
    return {plus, minus};
  }
  const auto push = [&dirs](double a, double b) {
    SmallVector v(2);
    v << a, b;
    dirs.push_back(v);
  };
  push(1.0, 0.0);
  push(0.0, 1.0);
  push(-1.0, 0.0);
  push(0.0, -1.0);
  for (int k = 0; k < count; ++k) {
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(count);
    push(std::cos(theta), std::sin(theta));
  }
  return dirs;
}

SubunitReport check_subunit(const VectorField& w, const MatrixField& q,
                            std::span<const Point> sample_points, int directions_per_point) {
  if (sample_points.empty()) throw Error(ErrorKind::InvalidRequest, "subunit check needs sample points");
  if (directions_per_point < 4) {
    throw Error(ErrorKind::InvalidRequest, "subunit check needs at least 4 directions per point");
  }
  if (w.dimension() != q.dimension()) {
    throw Error(ErrorKind::InvalidData, "vector field and matrix field dimensions differ");
  }
  const auto dirs = sample_directions(q.dimension(), directions_per_point);

  SubunitReport report;
  report.worst_ratio = 0.0;
  for (const auto& p : sample_points) {
    const SmallVector wv = w(p);
    const SmallMatrix qm = q(p);
    for (const auto& xi : dirs) {
      const double lhs = std::pow(wv.dot(xi), 2);
      const double rhs = quadratic_form(qm, xi);
      double ratio = 1.0;
      if (rhs > 0.0) {
        ratio = lhs / rhs;
      } else if (lhs > 0.0) {
        ratio = std::numeric_limits<double>::infinity();
      }
      report.worst_ratio = std::max(report.worst_ratio, ratio);
      if (lhs > rhs + kSubunitTolerance && report.ok) {
        report.ok = false;
        report.witness = SubunitWitness{p, xi};
      }
    }
  }
  return report;
}

Comparability estimate_comparability(const MatrixField& p, const MatrixField& q,
                                     std::span<const Point> sample_points,
                                     int directions_per_point) {
  if (p.dimension() != q.dimension()) {
    throw Error(ErrorKind::InvalidData, "P and Q dimensions differ");
  }
  const auto dirs = sample_directions(q.dimension(), directions_per_point);

  Comparability out;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& x : sample_points) {
    const SmallMatrix pm = p(x);
    const SmallMatrix qm = q(x);
    for (const auto& xi : dirs) {
      const double pf = quadratic_form(pm, xi);
      const double qf = quadratic_form(qm, xi);
      const bool p_zero = std::abs(pf) < kFormFloor;
      const bool q_zero = std::abs(qf) < kFormFloor;
      if (p_zero && q_zero) {
        ++out.degenerate_samples;
        continue;
      }
      if (p_zero != q_zero) {
        throw Error(ErrorKind::ComparabilityViolation,
                    "one quadratic form vanishes while the other does not at " + describe(x, xi));
      }
      const double ratio = pf / qf;
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
  }
  if (std::isfinite(lo)) {
    out.lower = lo;
    out.upper = hi;
  }
  return out;
}

std::vector<Point> halton_points(const Box& box, int dimension, int count, std::uint64_t seed) {
  const auto radical_inverse = [](std::uint64_t index, std::uint64_t base) {
    double inv = 1.0 / static_cast<double>(base);
    double factor = inv;
    double value = 0.0;
    while (index > 0) {
      value += static_cast<double>(index % base) * factor;
      index /= base;
      factor *= inv;
    }
    return value;
  };
  std::vector<Point> pts;
  pts.reserve(static_cast<std::size_t>(std::max(count, 0)));
  // Index 0 maps to the corner; start at 1 so every point is interior.
  const std::uint64_t offset = 1 + seed % 1000003ULL;
  for (int k = 0; k < count; ++k) {
    const std::uint64_t idx = offset + static_cast<std::uint64_t>(k);
    const double u = radical_inverse(idx, 2);
    const double v = radical_inverse(idx, 3);
    Point p{box.x0 + u * (box.x1 - box.x0), 0.0};
    if (dimension == 2) p[1] = box.y0 + v * (box.y1 - box.y0);
    pts.push_back(p);
  }
  return pts;
}

}  // namespace degell
