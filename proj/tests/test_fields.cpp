#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "degell/error.hpp"
#include "degell/fields.hpp"
#include "support/random_problems.hpp"

namespace degell {
namespace {

using testing::ex;
using testing::fmt;

std::vector<Point> grid(double x0, double x1, double y0, double y1, int n) {
  std::vector<Point> pts;
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      pts.push_back({x0 + (x1 - x0) * i / n, y0 + (y1 - y0) * j / n});
    }
  }
  return pts;
}

MatrixField grushin() { return MatrixField::diagonal({ex("1"), ex("x^2")}); }

TEST(MatrixField, IdentityAndGrushin) {
  const SmallMatrix id = MatrixField::identity(1)({0.3, 0.0});
  ASSERT_EQ(id.rows(), 1);
  EXPECT_EQ(id(0, 0), 1.0);
  const SmallMatrix g = grushin()({0.5, 0.2});
  EXPECT_EQ(g(0, 0), 1.0);
  EXPECT_EQ(g(0, 1), 0.0);
  EXPECT_EQ(g(1, 0), 0.0);
  EXPECT_EQ(g(1, 1), 0.25);
}

TEST(MatrixField, SymmetricByConstruction) {
  const MatrixField m = MatrixField::from_upper(2, {ex("x"), ex("x*y"), ex("y")});
  const SmallMatrix v = m({0.3, -0.7});
  EXPECT_EQ(v(0, 1), v(1, 0));
}

TEST(MatrixField, SingularEntryRaisesEvaluationError) {
  const MatrixField m = MatrixField::from_upper(1, {ex("1/x")});
  try {
    (void)m({0.0, 0.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Evaluation);
  }
}

TEST(Subunit, UnitFieldAgainstIdentity) {
  const auto pts = grid(0, 1, 0, 1, 4);
  const auto rep = check_subunit(VectorField({ex("1"), ex("0")}), MatrixField::identity(2), pts, 8);
  EXPECT_TRUE(rep.ok);
  EXPECT_LE(rep.worst_ratio, 1.0 + 1e-15);
  EXPECT_FALSE(rep.witness);
}

TEST(Subunit, DoubledFieldFailsWithWitness) {
  const auto pts = grid(0, 1, 0, 1, 2);
  const auto rep = check_subunit(VectorField({ex("2"), ex("0")}), MatrixField::identity(2), pts, 8);
  EXPECT_FALSE(rep.ok);
  ASSERT_TRUE(rep.witness);
  EXPECT_NEAR(rep.worst_ratio, 4.0, 1e-12);
  // The witness reproduces the violation.
  const SmallVector xi = rep.witness->direction;
  EXPECT_GT(std::pow(2.0 * xi(0), 2), xi.squaredNorm() + kSubunitTolerance);
}

TEST(Subunit, GrushinFieldIsSubunitWithEquality) {
  const auto pts = grid(-1, 1, -1, 1, 6);
  const auto rep = check_subunit(VectorField({ex("0"), ex("x")}), grushin(), pts, 32);
  EXPECT_TRUE(rep.ok);
  EXPECT_NEAR(rep.worst_ratio, 1.0, 1e-12);
}

TEST(Subunit, ZeroOverZeroCountsAsOne) {
  const std::vector<Point> origin{{0.0, 0.0}};
  const auto rep = check_subunit(VectorField({ex("0"), ex("x")}), grushin(), origin, 4);
  EXPECT_TRUE(rep.ok);
  EXPECT_EQ(rep.worst_ratio, 1.0);
}

TEST(Subunit, PositiveOverZeroIsInfinite) {
  const std::vector<Point> origin{{0.0, 0.0}};
  const auto rep = check_subunit(VectorField({ex("0"), ex("1")}), grushin(), origin, 4);
  EXPECT_FALSE(rep.ok);
  EXPECT_TRUE(std::isinf(rep.worst_ratio));
}

TEST(Subunit, Preconditions) {
  const std::vector<Point> none;
  const std::vector<Point> one{{0.1, 0.1}};
  const VectorField w({ex("1"), ex("0")});
  EXPECT_THROW((void)check_subunit(w, MatrixField::identity(2), none, 8), Error);
  EXPECT_THROW((void)check_subunit(w, MatrixField::identity(2), one, 3), Error);
}

TEST(Subunit, SignAndScalingProperties) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto pts = grid(-1, 1, -1, 1, 5);
  const MatrixField q = MatrixField::from_upper(2, {ex("1 + x^2"), ex("0.2"), ex("0.5 + y^2")});
  for (int trial = 0; trial < 20; ++trial) {
    const double a = 0.5 * u(rng);
    const double b = 0.5 * u(rng);
    const VectorField w({ex(fmt(a) + "*cos(y)"), ex(fmt(b) + "*sin(x)")});
    const VectorField neg({ex("-(" + fmt(a) + "*cos(y))"), ex("-(" + fmt(b) + "*sin(x))")});
    const auto r1 = check_subunit(w, q, pts, 16);
    const auto r2 = check_subunit(neg, q, pts, 16);
    EXPECT_EQ(r1.worst_ratio, r2.worst_ratio);
    EXPECT_EQ(r1.ok, r2.ok);
    if (r1.ok) {
      for (double s : {0.0, 0.25, 0.5, 1.0}) {
        const VectorField scaled({ex(fmt(s) + "*" + fmt(a) + "*cos(y)"), ex(fmt(s) + "*" + fmt(b) + "*sin(x)")});
        EXPECT_TRUE(check_subunit(scaled, q, pts, 16).ok);
      }
    }
  }
}

TEST(Comparability, IdenticalAndScaledFields) {
  const auto pts = grid(0, 1, 0, 1, 4);
  const auto same = estimate_comparability(MatrixField::identity(2), MatrixField::identity(2), pts, 16);
  EXPECT_EQ(same.lower, 1.0);
  EXPECT_EQ(same.upper, 1.0);
  const auto twice = estimate_comparability(MatrixField::diagonal({ex("2"), ex("2")}),
                                            MatrixField::identity(2), pts, 16);
  EXPECT_DOUBLE_EQ(twice.lower, 2.0);
  EXPECT_DOUBLE_EQ(twice.upper, 2.0);
}

TEST(Comparability, SelfComparisonIsExactlyOne) {
  const auto pts = grid(-1, 1, -1, 1, 7);
  const MatrixField p = MatrixField::from_upper(2, {ex("1 + sin(x)^2"), ex("0.3*x*y"), ex("x^2 + 0.1")});
  const auto c = estimate_comparability(p, p, pts, 32);
  EXPECT_EQ(c.lower, 1.0);
  EXPECT_EQ(c.upper, 1.0);
  const auto g = estimate_comparability(grushin(), grushin(), grid(-1, 1, -1, 1, 8), 32);
  EXPECT_EQ(g.lower, 1.0);
  EXPECT_EQ(g.upper, 1.0);
  EXPECT_GT(g.degenerate_samples, 0u);
}

TEST(Comparability, GrushinAgainstIdentityShrinks) {
  const auto coarse = estimate_comparability(grushin(), MatrixField::identity(2), grid(0.05, 1, 0, 1, 4), 32);
  const auto fine = estimate_comparability(grushin(), MatrixField::identity(2), grid(0.01, 1, 0, 1, 8), 32);
  EXPECT_GT(coarse.lower, 0.0);
  EXPECT_LE(coarse.upper, 1.0 + 1e-15);
  EXPECT_LT(fine.lower, coarse.lower);
  EXPECT_NEAR(fine.lower, 1e-4, 1e-12);
}

TEST(Comparability, OneSidedDegeneracyIsAViolation) {
  const std::vector<Point> origin{{0.0, 0.5}};
  try {
    (void)estimate_comparability(grushin(), MatrixField::identity(2), origin, 8);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ComparabilityViolation);
  }
}

TEST(Comparability, AllDegenerateDefaultsToOne) {
  const std::vector<Point> pts{{0.2, 0.0}, {0.7, 0.0}};
  const auto c = estimate_comparability(MatrixField::zero(1), MatrixField::zero(1), pts, 4);
  EXPECT_EQ(c.lower, 1.0);
  EXPECT_EQ(c.upper, 1.0);
}

TEST(Directions, OneAndTwoDimensions) {
  EXPECT_EQ(sample_directions(1, 32).size(), 2u);
  const auto d2 = sample_directions(2, 32);
  EXPECT_EQ(d2.size(), 36u);
  for (const auto& d : d2) EXPECT_NEAR(d.norm(), 1.0, 1e-15);
}

TEST(Halton, DeterministicAndInterior) {
  const Box box{-1.0, 1.0, 0.0, 2.0};
  const auto a = halton_points(box, 2, 50, 11);
  const auto b = halton_points(box, 2, 50, 11);
  const auto c = halton_points(box, 2, 50, 12);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  for (const auto& p : a) {
    EXPECT_GT(p[0], box.x0);
    EXPECT_LT(p[0], box.x1);
    EXPECT_GT(p[1], box.y0);
    EXPECT_LT(p[1], box.y1);
  }
}

}  // namespace
}  // namespace degell
