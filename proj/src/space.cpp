#include "degell/space.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "degell/error.hpp"

namespace degell {

namespace {

// 3-point Gauss-Legendre on a segment, exact through degree 5.
void segment_rule(const Point& a, const Point& b, double length, std::vector<QuadratureNode>& out) {
  static const double offset = std::sqrt(3.0 / 5.0);
  static constexpr std::array<double, 3> weights{5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
  const std::array<double, 3> ref{0.5 * (1.0 - offset), 0.5, 0.5 * (1.0 + offset)};
  for (int q = 0; q < 3; ++q) {
    const double s = ref[static_cast<std::size_t>(q)];
    const Point x{a[0] + s * (b[0] - a[0]), 0.0};
    out.push_back({x, weights[static_cast<std::size_t>(q)] * length, {1.0 - s, s, 0.0}});
  }
}

// Mid-edge rule on a triangle, exact for quadratics.
void triangle_rule(const Point& a, const Point& b, const Point& c, double area,
                   std::vector<QuadratureNode>& out) {
  const auto mid = [](const Point& p, const Point& q) {
    return Point{0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])};
  };
  const double w = area / 3.0;
  out.push_back({mid(a, b), w, {0.5, 0.5, 0.0}});
  out.push_back({mid(b, c), w, {0.0, 0.5, 0.5}});
  out.push_back({mid(c, a), w, {0.5, 0.0, 0.5}});
}

}  // namespace

DiscreteSpace::DiscreteSpace(Mesh mesh, BoundaryKind bc) {
  auto data = std::make_shared<Data>(Data{std::move(mesh), bc, 0, {}, {}, {}, {}});
  const Mesh& m = data->mesh;

  data->dof_of_vertex.assign(m.vertex_count(), -1);
  for (std::size_t v = 0; v < m.vertex_count(); ++v) {
    if (bc == BoundaryKind::Dirichlet && m.is_boundary(v)) continue;
    data->dof_of_vertex[v] = data->dof_count++;
    data->vertex_of_dof.push_back(static_cast<int>(v));
  }

  data->nodes.reserve(3 * m.cell_count());
  data->gradients.reserve(static_cast<std::size_t>(m.vertices_per_cell()) * m.cell_count());
  for (std::size_t c = 0; c < m.cell_count(); ++c) {
    const auto& cell = m.cell(c);
    const double measure = m.cell_measure(c);
    if (m.dimension() == 1) {
      const Point& a = m.vertex(static_cast<std::size_t>(cell[0]));
      const Point& b = m.vertex(static_cast<std::size_t>(cell[1]));
      segment_rule(a, b, measure, data->nodes);
      const double len = b[0] - a[0];
      SmallVector g0(1), g1(1);
      g0 << -1.0 / len;
      g1 << 1.0 / len;
      data->gradients.push_back(g0);
      data->gradients.push_back(g1);
    } else {
      const Point& a = m.vertex(static_cast<std::size_t>(cell[0]));
      const Point& b = m.vertex(static_cast<std::size_t>(cell[1]));
      const Point& c2 = m.vertex(static_cast<std::size_t>(cell[2]));
      triangle_rule(a, b, c2, measure, data->nodes);
      // grad(lambda_i) = J^{-T} grad_ref(lambda_i) with J = [b-a, c-a].
      Eigen::Matrix2d jac;
      jac << b[0] - a[0], c2[0] - a[0], b[1] - a[1], c2[1] - a[1];
      const Eigen::Matrix2d inv_t = jac.inverse().transpose();
      const Eigen::Vector2d r1 = inv_t * Eigen::Vector2d(1.0, 0.0);
      const Eigen::Vector2d r2 = inv_t * Eigen::Vector2d(0.0, 1.0);
      const Eigen::Vector2d r0 = -(r1 + r2);
      data->gradients.emplace_back(r0);
      data->gradients.emplace_back(r1);
      data->gradients.emplace_back(r2);
    }
  }
  data_ = std::move(data);
}

DiscreteSpace build_space(const Mesh& mesh, BoundaryKind bc) { return DiscreteSpace(mesh, bc); }

std::span<const QuadratureNode> DiscreteSpace::quadrature(std::size_t cell) const {
  return std::span<const QuadratureNode>(data_->nodes).subspan(3 * cell, 3);
}

const SmallVector& DiscreteSpace::basis_gradient(std::size_t cell, int local) const {
  return data_->gradients[cell * static_cast<std::size_t>(mesh().vertices_per_cell()) +
                          static_cast<std::size_t>(local)];
}

std::vector<Point> DiscreteSpace::quadrature_points() const {
  std::vector<Point> pts;
  pts.reserve(data_->nodes.size());
  for (const auto& n : data_->nodes) pts.push_back(n.x);
  return pts;
}

Eigen::VectorXd DiscreteSpace::to_vertex_values(const Eigen::VectorXd& coeffs) const {
  if (coeffs.size() != dof_count()) {
    throw Error(ErrorKind::InvalidData, "coefficient vector length does not match dof count");
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh().vertex_count()));
  for (int d = 0; d < dof_count(); ++d) out(vertex_of_dof(d)) = coeffs(d);
  return out;
}

Eigen::VectorXd DiscreteSpace::restrict_to_dofs(const Eigen::VectorXd& vertex_values) const {
  if (vertex_values.size() != static_cast<Eigen::Index>(mesh().vertex_count())) {
    throw Error(ErrorKind::InvalidData, "vertex vector length does not match vertex count");
  }
  Eigen::VectorXd out(dof_count());
  for (int d = 0; d < dof_count(); ++d) out(d) = vertex_values(vertex_of_dof(d));
  return out;
}

SmallVector DiscreteSpace::cell_gradient(std::size_t cell, const Eigen::VectorXd& vertex_values) const {
  const auto& verts = mesh().cell(cell);
  SmallVector g = SmallVector::Zero(dimension());
  for (int a = 0; a < mesh().vertices_per_cell(); ++a) {
    g += vertex_values(verts[static_cast<std::size_t>(a)]) * basis_gradient(cell, a);
  }
  return g;
}

double DiscreteSpace::value_at(std::size_t cell, const QuadratureNode& node,
                               const Eigen::VectorXd& vertex_values) const {
  const auto& verts = mesh().cell(cell);
  double v = 0.0;
  for (int a = 0; a < mesh().vertices_per_cell(); ++a) {
    v += node.basis[static_cast<std::size_t>(a)] * vertex_values(verts[static_cast<std::size_t>(a)]);
  }
  return v;
}

double DiscreteSpace::integrate(
    const std::function<double(std::size_t, const QuadratureNode&)>& integrand) const {
  double sum = 0.0;
  for (std::size_t c = 0; c < mesh().cell_count(); ++c) {
    for (const auto& node : quadrature(c)) sum += node.weight * integrand(c, node);
  }
  return sum;
}

WeakSolution make_solution(const DiscreteSpace& space, Eigen::VectorXd coeffs) {
  const Eigen::VectorXd vertex_values = space.to_vertex_values(coeffs);
  WeakSolution u{std::move(coeffs), {}, space};
  u.gradient.reserve(space.mesh().cell_count());
  for (std::size_t c = 0; c < space.mesh().cell_count(); ++c) {
    u.gradient.push_back(space.cell_gradient(c, vertex_values));
  }
  return u;
}

Eigen::VectorXd interpolate(const Mesh& mesh, const ScalarExpr& expr) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(mesh.vertex_count()));
  for (std::size_t v = 0; v < mesh.vertex_count(); ++v) out(static_cast<Eigen::Index>(v)) = expr(mesh.vertex(v));
  return out;
}

}  // namespace degell
