#include "degell/serialize.hpp"

#include <cmath>
#include <cstdio>

namespace degell {

namespace {

Json numbers(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number(v(i)));
  return out;
}

Json numbers(const std::vector<double>& v) {
  Json out = Json::array();
  for (double d : v) out.push_back(number(d));
  return out;
}

Json expressions(const std::vector<ScalarExpr>& list) {
  Json out = Json::array();
  for (const auto& e : list) out.push_back(e.source());
  return out;
}

Json fields(const SubunitTuple& tuple) {
  Json out = Json::array();
  for (const auto& w : tuple) out.push_back(expressions(w.components()));
  return out;
}

Json matrix(const MatrixField& m) {
  Json out = Json::array();
  for (int i = 0; i < m.dimension(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < m.dimension(); ++j) row.push_back(m.entry(i, j).source());
    out.push_back(std::move(row));
  }
  return out;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Json number(double value) {
  if (std::isnan(value)) return nullptr;
  if (std::isinf(value)) return value > 0 ? "infinity" : "-infinity";
  return value;
}

Json to_json(const ProblemSpec& p) {
  Json domain;
  if (p.domain.kind == DomainSpec::Kind::Interval) {
    domain = {{"kind", "interval"},
              {"a", number(p.domain.x_range[0])},
              {"b", number(p.domain.x_range[1])},
              {"n", p.domain.nx}};
  } else {
    domain = {{"kind", "rect"},
              {"x_range", {number(p.domain.x_range[0]), number(p.domain.x_range[1])}},
              {"y_range", {number(p.domain.y_range[0]), number(p.domain.y_range[1])}},
              {"nx", p.domain.nx},
              {"ny", p.domain.ny}};
  }
  domain["bc"] = to_string(p.bc);
  Json data = {{"f", p.f.source()}, {"g", expressions(p.g)}, {"T", fields(p.T)}};
  if (p.candidate) data["u"] = p.candidate->source();
  Json numerics = {{"seed", p.numerics.seed},
                   {"trials", p.numerics.trials},
                   {"negativity_trials", p.numerics.negativity_trials},
                   {"tol_rank", number(p.numerics.tol_rank)},
                   {"directions", p.numerics.directions},
                   {"sample_points", p.numerics.sample_points},
                   {"k", p.numerics.eigen_count}};
  numerics["C4"] = p.numerics.poincare_constant ? number(*p.numerics.poincare_constant) : Json("unavailable");
  return {{"domain", domain},
          {"operator",
           {{"P", matrix(p.P)},
            {"Q", matrix(p.Q)},
            {"H", expressions(p.H)},
            {"G", expressions(p.G)},
            {"R", fields(p.R)},
            {"S", fields(p.S)},
            {"F", p.F.source()}}},
          {"data", data},
          {"exponents",
           {{"t", number(p.exponents.t)},
            {"q", number(p.exponents.q)},
            {"omega", number(p.exponents.omega)},
            {"sigma", number(p.exponents.sigma)}}},
          {"numerics", numerics}};
}

Json to_json(const Mesh& mesh) {
  Json vertices = Json::array();
  for (const auto& v : mesh.vertices()) {
    if (mesh.dimension() == 1) vertices.push_back({number(v[0])});
    else vertices.push_back({number(v[0]), number(v[1])});
  }
  Json cells = Json::array();
  for (const auto& c : mesh.cells()) {
    Json cell = Json::array();
    for (int a = 0; a < mesh.vertices_per_cell(); ++a) cell.push_back(c[static_cast<std::size_t>(a)]);
    cells.push_back(std::move(cell));
  }
  Json boundary = Json::array();
  for (auto b : mesh.boundary_vertices()) boundary.push_back(b);
  return {{"dimension", mesh.dimension()},
          {"vertices", vertices},
          {"cells", cells},
          {"boundary_vertices", boundary},
          {"mesh_size", number(mesh.mesh_size())}};
}

Json to_json(const FredholmOutcome& o) {
  Json out = {{"branch", to_string(o.branch)},
              {"dim_N", o.dim_N},
              {"dim_Nstar", o.dim_Nstar},
              {"compatibility_residuals", numbers(o.compatibility_residuals)},
              {"galerkin_residual", number(o.galerkin_residual)},
              {"warnings", o.warnings}};
  out["compatible"] = o.compatible ? Json(*o.compatible) : Json(nullptr);
  out["solution"] = o.solution ? numbers(o.solution->vertex_values()) : Json(nullptr);
  Json N = Json::array();
  for (const auto& w : o.N_basis) N.push_back(numbers(w.vertex_values()));
  Json Nstar = Json::array();
  for (const auto& w : o.Nstar_basis) Nstar.push_back(numbers(w.vertex_values()));
  out["N_basis"] = N;
  out["Nstar_basis"] = Nstar;
  return out;
}

Json to_json(const ShiftedSolution& s) {
  return {{"mu", number(s.mu)},
          {"gamma", number(s.gamma)},
          {"relative_residual", number(s.relative_residual)},
          {"norm", number(s.norm)},
          {"functional_norm", number(s.functional_norm)},
          {"data_norm", number(s.data_norm)},
          {"bound_constant", number(s.bound_constant)},
          {"stability_holds", s.stability_holds},
          {"solution", numbers(s.solution.vertex_values())}};
}

Json to_json(const StabilityReport& r) {
  Json out = {{"constant", number(r.constant)},
              {"lhs", number(r.lhs)},
              {"rhs", number(r.rhs)},
              {"holds", r.holds},
              {"unbounded", r.unbounded}};
  out["lambda_shift"] = r.lambda_shift ? number(*r.lambda_shift) : Json(nullptr);
  return out;
}

Json to_json(const SpectrumResult& r) {
  Json groups = Json::array();
  for (const auto& g : r.groups) groups.push_back({{"value", number(g.value)}, {"multiplicity", g.multiplicity}});
  Json functions = Json::array();
  for (const auto& u : r.eigenfunctions) functions.push_back(numbers(u.vertex_values()));
  return {{"eigenvalues", numbers(r.eigenvalues)},
          {"imaginary", numbers(r.imaginary)},
          {"groups", groups},
          {"self_adjoint", r.self_adjoint},
          {"diagnostics",
           {{"orthogonality_max", number(r.diagnostics.orthogonality_max)},
            {"first_eigfn_min", number(r.diagnostics.first_eigfn_min)},
            {"monotone", r.diagnostics.monotone},
            {"residual_max", number(r.diagnostics.residual_max)}}},
          {"eigenfunctions", functions}};
}

Json to_json(const SpectralClaims& c) {
  Json out = {{"monotone", c.monotone},
              {"orthogonality_max", number(c.orthogonality_max)},
              {"orthogonal", c.orthogonal},
              {"first_eigfn_nonnegative", c.first_eigfn_nonnegative},
              {"holds", c.holds},
              {"notes", c.notes}};
  out["positive"] = c.positive ? Json(*c.positive) : Json(nullptr);
  out["qh1_orthogonality_max"] = c.qh1_orthogonality_max ? number(*c.qh1_orthogonality_max) : Json(nullptr);
  return out;
}

Json to_json(const ConvergenceTable& t) {
  Json levels = Json::array();
  for (const auto& l : t.levels) {
    levels.push_back({{"resolution", l.resolution}, {"h", number(l.h)}, {"eigenvalues", numbers(l.eigenvalues)}});
  }
  Json rates = Json::array();
  for (const auto& per_value : t.rates) {
    Json row = Json::array();
    for (const auto& r : per_value) {
      if (r.exact) row.push_back("exact");
      else if (r.rate) row.push_back(number(*r.rate));
      else row.push_back(nullptr);
    }
    rates.push_back(std::move(row));
  }
  return {{"levels", levels}, {"rates", rates}};
}

Json to_json(const InequalityReport& r) {
  Json extras = Json::object();
  for (const auto& [k, v] : r.extras) extras[k] = number(v);
  Json out = {{"name", r.name},
              {"holds", r.holds},
              {"constant", number(r.constant)},
              {"trials", r.trials},
              {"seed", r.seed},
              {"lower_bound", r.lower_bound},
              {"extras", extras},
              {"notes", r.notes}};
  if (r.witness) {
    Json w = {{"label", r.witness->label}, {"value", number(r.witness->value)}, {"u", numbers(r.witness->u)}};
    if (r.witness->v.size() > 0) w["v"] = numbers(r.witness->v);
    out["witness"] = w;
  } else {
    out["witness"] = nullptr;
  }
  return out;
}

Json to_json(const UniquenessReport& r) {
  Json out = {{"precondition_met", r.precondition_met},
              {"holds", r.holds},
              {"solution_norm", number(r.solution_norm)},
              {"notes", r.notes}};
  out["branch"] = r.branch ? Json(to_string(*r.branch)) : Json(nullptr);
  out["epsilon"] = r.epsilon ? number(*r.epsilon) : Json(nullptr);
  return out;
}

Json to_json(const MaxPrincipleReport& r) {
  return {{"holds", r.holds},
          {"interior_max", number(r.interior_max)},
          {"boundary_max_positive", number(r.boundary_max_positive)},
          {"tolerance", number(r.tolerance)},
          {"subsolution_residual_max", number(r.subsolution_residual_max)}};
}

std::string dump(const Json& json) { return json.dump(2) + "\n"; }

void write_vertex_csv(std::ostream& out, const Mesh& mesh, const Eigen::VectorXd& values) {
  out << (mesh.dimension() == 1 ? "vertex,x,value\n" : "vertex,x,y,value\n");
  for (std::size_t v = 0; v < mesh.vertex_count(); ++v) {
    const auto& p = mesh.vertex(v);
    out << v << ',' << format_double(p[0]) << ',';
    if (mesh.dimension() == 2) out << format_double(p[1]) << ',';
    out << format_double(values(static_cast<Eigen::Index>(v))) << '\n';
  }
}

void write_coo(std::ostream& out, const SparseMatrix& matrix) {
  for (int k = 0; k < matrix.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(matrix, k); it; ++it) {
      out << it.row() << ' ' << it.col() << ' ' << format_double(it.value()) << '\n';
    }
  }
}

}  // namespace degell
