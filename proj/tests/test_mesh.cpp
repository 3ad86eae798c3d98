#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "degell/error.hpp"
#include "degell/mesh.hpp"
#include "degell/serialize.hpp"

namespace degell {
namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorKind::Io;
}

TEST(IntervalMesh, UniformUnitInterval) {
  const Mesh m = build_interval_mesh(0.0, 1.0, 2);
  ASSERT_EQ(m.vertex_count(), 3u);
  EXPECT_DOUBLE_EQ(m.vertex(0)[0], 0.0);
  EXPECT_DOUBLE_EQ(m.vertex(1)[0], 0.5);
  EXPECT_DOUBLE_EQ(m.vertex(2)[0], 1.0);
  ASSERT_EQ(m.cell_count(), 2u);
  for (double measure : m.cell_measures()) EXPECT_DOUBLE_EQ(measure, 0.5);
  ASSERT_EQ(m.boundary_vertices().size(), 2u);
  EXPECT_EQ(m.boundary_vertices()[0], 0);
  EXPECT_EQ(m.boundary_vertices()[1], 2);
  EXPECT_EQ(m.cell(0)[2], -1);
}

TEST(IntervalMesh, CellsOfPiOverFour) {
  const Mesh m = build_interval_mesh(0.0, std::numbers::pi, 4);
  ASSERT_EQ(m.cell_count(), 4u);
  for (double measure : m.cell_measures()) EXPECT_NEAR(measure, std::numbers::pi / 4.0, 1e-15);
}

TEST(IntervalMesh, RejectsBadInput) {
  EXPECT_EQ(kind_of([] { build_interval_mesh(1.0, 0.0, 2); }), ErrorKind::InvalidDomain);
  EXPECT_EQ(kind_of([] { build_interval_mesh(0.0, 1.0, 0); }), ErrorKind::InvalidResolution);
}

TEST(RectMesh, UnitSquareSingleCell) {
  const Mesh m = build_rect_mesh({0.0, 1.0}, {0.0, 1.0}, 1, 1);
  ASSERT_EQ(m.cell_count(), 2u);
  for (double measure : m.cell_measures()) EXPECT_DOUBLE_EQ(measure, 0.5);
  EXPECT_EQ(m.boundary_vertices().size(), 4u);
}

TEST(RectMesh, TwoByTwoCounts) {
  const Mesh m = build_rect_mesh({0.0, 1.0}, {0.0, 1.0}, 2, 2);
  EXPECT_EQ(m.cell_count(), 8u);
  EXPECT_EQ(m.vertex_count(), 9u);
  EXPECT_EQ(m.boundary_vertices().size(), 8u);
  EXPECT_FALSE(m.is_boundary(4));
}

TEST(RectMesh, DiagonalOrientationAndIndexing) {
  const Mesh m = build_rect_mesh({0.0, 2.0}, {0.0, 1.0}, 2, 1);
  // Vertex (i, j) has index j*(nx+1)+i.
  EXPECT_DOUBLE_EQ(m.vertex(4)[0], 1.0);
  EXPECT_DOUBLE_EQ(m.vertex(4)[1], 1.0);
  // First grid cell splits along (0,0)-(1,1).
  const auto& t0 = m.cell(0);
  const auto& t1 = m.cell(1);
  EXPECT_EQ(t0[0], 0);
  EXPECT_EQ(t0[2], 4);
  EXPECT_EQ(t1[1], 4);
}

TEST(RectMesh, TotalMeasureOfSquare) {
  const Mesh m = build_rect_mesh({-1.0, 1.0}, {-1.0, 1.0}, 4, 4);
  double sum = 0.0;
  for (double measure : m.cell_measures()) sum += measure;
  EXPECT_NEAR(sum, 4.0, 4e-12);
  EXPECT_NEAR(m.total_measure(), 4.0, 4e-12);
}

TEST(RectMesh, RejectsEmptyInterval) {
  EXPECT_EQ(kind_of([] { build_rect_mesh({0.0, 0.0}, {0.0, 1.0}, 2, 2); }), ErrorKind::InvalidDomain);
  EXPECT_EQ(kind_of([] { build_rect_mesh({0.0, 1.0}, {0.0, 1.0}, 0, 2); }), ErrorKind::InvalidResolution);
}

class MeshProperties : public ::testing::TestWithParam<std::tuple<int, int>> {};

TEST_P(MeshProperties, MeasuresCoverageAndBoundary) {
  const auto [nx, ny] = GetParam();
  const std::array<double, 2> xr{-0.7, 1.3};
  const std::array<double, 2> yr{0.2, 0.9};
  const Mesh m = build_rect_mesh(xr, yr, nx, ny);
  const double area = (xr[1] - xr[0]) * (yr[1] - yr[0]);
  double sum = 0.0;
  for (double measure : m.cell_measures()) {
    EXPECT_GT(measure, 0.0);
    sum += measure;
  }
  EXPECT_NEAR(sum, area, 1e-12 * area);

  // Boundary set equals the vertices lying on the rectangle boundary.
  for (std::size_t v = 0; v < m.vertex_count(); ++v) {
    const auto& p = m.vertex(v);
    const bool on = std::abs(p[0] - xr[0]) < 1e-12 || std::abs(p[0] - xr[1]) < 1e-12 ||
                    std::abs(p[1] - yr[0]) < 1e-12 || std::abs(p[1] - yr[1]) < 1e-12;
    EXPECT_EQ(m.is_boundary(v), on) << "vertex " << v;
  }

  std::vector<int> incidence(m.vertex_count(), 0);
  for (const auto& c : m.cells()) {
    for (int a = 0; a < 3; ++a) ++incidence[static_cast<std::size_t>(c[static_cast<std::size_t>(a)])];
  }
  for (std::size_t v = 0; v < m.vertex_count(); ++v) {
    EXPECT_GE(incidence[v], m.is_boundary(v) ? 1 : 3);
  }
}

INSTANTIATE_TEST_SUITE_P(Resolutions, MeshProperties,
                         ::testing::Values(std::tuple{1, 1}, std::tuple{3, 2}, std::tuple{7, 5},
                                           std::tuple{16, 16}));

TEST(MeshJson, HasRequiredKeys) {
  const Json j = to_json(build_rect_mesh({0.0, 1.0}, {0.0, 1.0}, 2, 2));
  EXPECT_EQ(j.at("dimension"), 2);
  EXPECT_EQ(j.at("vertices").size(), 9u);
  EXPECT_EQ(j.at("cells").size(), 8u);
  EXPECT_EQ(j.at("boundary_vertices").size(), 8u);
}

}  // namespace
}  // namespace degell
