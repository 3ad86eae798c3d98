#include "degell/cli.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "degell/analysis.hpp"
#include "degell/error.hpp"
#include "degell/serialize.hpp"
#include "degell/solver.hpp"
#include "degell/spec_file.hpp"
#include "degell/spectral.hpp"

namespace degell {

namespace {

struct Options {
  std::string spec_path;
  std::string out_prefix;
  // solve
  double mu = 0.0;
  bool has_mu = false;
  bool export_matrices = false;
  // spectrum
  int k = 0;
  bool recursion = false;
  // check
  std::string which;
  int trials = 0;
  std::uint64_t seed = 0;
  bool has_seed = false;
  // poincare
  double r = 2.0;
  std::string kind = "global";
  std::vector<std::string> balls;
  double beta = 1.0;
  // convergence
  std::vector<int> resolutions;
};

std::uint64_t seed_from_environment(std::uint64_t fallback) {
  const char* env = std::getenv("DEGELL_SEED");
  if (env == nullptr || *env == '\0') return fallback;
  const std::string_view text(env);
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error(ErrorKind::InvalidInput, "DEGELL_SEED must be a nonnegative integer");
  }
  return value;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorKind::Io, "cannot write '" + path + "'");
  file << content;
  if (!file) throw Error(ErrorKind::Io, "failed writing '" + path + "'");
}

std::string vertex_csv(const Mesh& mesh, const Eigen::VectorXd& values) {
  std::ostringstream os;
  write_vertex_csv(os, mesh, values);
  return os.str();
}

std::string coo(const SparseMatrix& m) {
  std::ostringstream os;
  write_coo(os, m);
  return os.str();
}

class Session {
 public:
  Session(const Options& options, std::ostream& out) : options_(options), out_(out) {
    problem_ = load_problem(options.spec_path);
    problem_.numerics.seed = seed_from_environment(problem_.numerics.seed);
    if (options.has_seed) problem_.numerics.seed = options.seed;
    for (const auto& w : problem_.exponent_warnings()) warnings_.push_back(w);
  }

  int solve();
  int spectrum();
  int check();
  int poincare();
  int convergence();

 private:
  DiscreteSpace space(BoundaryKind bc) const { return build_space(build_mesh(problem_), bc); }

  void add_warnings(const std::vector<std::string>& more) {
    warnings_.insert(warnings_.end(), more.begin(), more.end());
  }

  Json envelope(const std::string& command, Json result) const {
    return {{"command", command}, {"spec", to_json(problem_)}, {"result", std::move(result)},
            {"warnings", warnings_}};
  }

  // Writes PREFIX.json plus side files, or the JSON to stdout.
  void emit(const Json& json, const std::vector<std::pair<std::string, std::string>>& side_files) {
    if (options_.out_prefix.empty()) {
      out_ << dump(json);
      return;
    }
    write_file(options_.out_prefix + ".json", dump(json));
    for (const auto& [suffix, content] : side_files) write_file(options_.out_prefix + suffix, content);
  }

  const Options& options_;
  std::ostream& out_;
  ProblemSpec problem_;
  std::vector<std::string> warnings_;
};

int Session::solve() {
  if (options_.export_matrices && options_.out_prefix.empty()) {
    throw Error(ErrorKind::InvalidRequest, "--export needs --out");
  }
  const DiscreteSpace sp = space(problem_.bc);
  const AssembledForm form = assemble_form(sp, problem_);
  add_warnings(form.warnings);
  const Eigen::VectorXd rhs = assemble_rhs(sp, problem_);

  std::vector<std::pair<std::string, std::string>> files;
  if (options_.export_matrices) {
    files.emplace_back("_mesh.json", dump(to_json(sp.mesh())));
    files.emplace_back("_A.coo", coo(form.A));
    files.emplace_back("_M.coo", coo(form.M));
    files.emplace_back("_Gq.coo", coo(form.Gq));
    files.emplace_back("_rhs.csv", [&] {
      std::ostringstream os;
      os.precision(17);
      for (Eigen::Index i = 0; i < rhs.size(); ++i) os << rhs(i) << '\n';
      return os.str();
    }());
  }

  Json result = {{"c1_hat", number(form.c1_hat)}, {"C1_hat", number(form.C1_hat)}, {"dofs", form.size()}};
  int code = kExitOk;
  if (options_.has_mu) {
    const ShiftedSolution shifted = solve_shifted(form, options_.mu, rhs);
    result["mode"] = "shifted";
    result["shifted"] = to_json(shifted);
    files.emplace_back("_solution.csv", vertex_csv(sp.mesh(), shifted.solution.vertex_values()));
  } else {
    const FredholmOutcome outcome = solve_fredholm(form, rhs);
    add_warnings(outcome.warnings);
    result["mode"] = "fredholm";
    result["outcome"] = to_json(outcome);
    if (outcome.solution) {
      result["stability"] = to_json(stability_report(outcome, problem_));
      files.emplace_back("_solution.csv", vertex_csv(sp.mesh(), outcome.solution->vertex_values()));
    }
    if (outcome.compatible && !*outcome.compatible) code = kExitNegative;
  }
  emit(envelope("solve", std::move(result)), files);
  return code;
}

int Session::spectrum() {
  const DiscreteSpace sp = space(problem_.bc);
  const AssembledForm form = assemble_form(sp, problem_);
  add_warnings(form.warnings);
  const int k = options_.k > 0 ? options_.k : problem_.numerics.eigen_count;
  const SpectrumResult direct = compute_spectrum(form, k);

  std::optional<bool> negativity;
  if (direct.self_adjoint) {
    negativity = check_negativity(problem_, sp, NegativityCondition::Cond1I, problem_.numerics.negativity_trials,
                                  problem_.numerics.seed)
                     .holds;
  }
  Json result = {{"spectrum", to_json(direct)},
                 {"claims", to_json(verify_spectral_claims(direct, form, negativity))}};
  if (options_.recursion) {
    const SpectrumResult recursive = rayleigh_recursion(form, k);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) {
      const double a = direct.eigenvalues(i);
      const double b = recursive.eigenvalues(i);
      worst = std::max(worst, std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1.0}));
    }
    result["recursion"] = {{"eigenvalues", to_json(recursive)["eigenvalues"]},
                           {"max_relative_difference", number(worst)},
                           {"agree", spectra_agree(direct.eigenvalues, recursive.eigenvalues)}};
  }
  std::vector<std::pair<std::string, std::string>> files;
  for (std::size_t i = 0; i < direct.eigenfunctions.size(); ++i) {
    files.emplace_back("_eigfn_" + std::to_string(i + 1) + ".csv",
                       vertex_csv(sp.mesh(), direct.eigenfunctions[i].vertex_values()));
  }
  emit(envelope("spectrum", std::move(result)), files);
  return kExitOk;
}

int Session::check() {
  const auto& num = problem_.numerics;
  const int trials = options_.trials > 0 ? options_.trials : num.negativity_trials;
  const Mesh mesh = build_mesh(problem_);
  Json result;
  bool holds = true;

  if (const auto which = parse_negativity_condition(options_.which)) {
    const auto report = check_negativity(problem_, build_space(mesh, problem_.bc), *which, trials, num.seed);
    holds = report.holds;
    result = to_json(report);
  } else if (options_.which == "uniqueness") {
    const auto report = verify_uniqueness(problem_, build_space(mesh, BoundaryKind::Neumann));
    holds = !report.precondition_met || report.holds;
    result = to_json(report);
    result["skipped"] = !report.precondition_met;
  } else if (options_.which == "maxprinciple") {
    const DiscreteSpace sp = build_space(mesh, BoundaryKind::Dirichlet);
    Eigen::VectorXd u;
    std::string source;
    if (problem_.candidate) {
      u = interpolate(mesh, *problem_.candidate);
      source = "candidate";
    } else {
      const FredholmOutcome outcome = solve_dirichlet(problem_, sp);
      if (!outcome.solution) throw Error(ErrorKind::Precondition, "Dirichlet problem has no solution");
      u = outcome.solution->vertex_values();
      source = "dirichlet solution";
    }
    const auto report = verify_max_principle(problem_, sp, u);
    holds = report.holds;
    result = to_json(report);
    result["function"] = source;
  } else if (options_.which == "subunit") {
    const DiscreteSpace sp = build_space(mesh, problem_.bc);
    const auto samples = structural_samples(sp, problem_);
    Json fields = Json::array();
    auto run = [&](const SubunitTuple& tuple, const char* name) {
      for (std::size_t i = 0; i < tuple.size(); ++i) {
        const auto rep = check_subunit(tuple[i], problem_.Q, samples, num.directions);
        holds = holds && rep.ok;
        Json entry = {{"field", std::string(name) + "[" + std::to_string(i) + "]"},
                      {"ok", rep.ok},
                      {"worst_ratio", number(rep.worst_ratio)}};
        if (rep.witness) {
          Json dir = Json::array();
          for (Eigen::Index d = 0; d < rep.witness->direction.size(); ++d) dir.push_back(number(rep.witness->direction(d)));
          entry["witness"] = {{"point", {number(rep.witness->point[0]), number(rep.witness->point[1])}},
                              {"direction", dir}};
        }
        fields.push_back(std::move(entry));
      }
    };
    run(problem_.R, "R");
    run(problem_.S, "S");
    run(problem_.T, "T");
    result = {{"holds", holds}, {"fields", fields}};
  } else if (options_.which == "selfadjoint") {
    const DiscreteSpace sp = build_space(mesh, problem_.bc);
    const AssembledForm form = assemble_form(sp, problem_);
    const bool coefficients = coefficients_self_adjoint(sp, problem_);
    const bool matrix = is_symmetric(form.A);
    holds = coefficients == matrix;
    result = {{"coefficients_self_adjoint", coefficients}, {"matrix_symmetric", matrix}, {"agree", holds}};
  } else if (options_.which == "coercivity") {
    const DiscreteSpace sp = build_space(mesh, problem_.bc);
    const AssembledForm form = assemble_form(sp, problem_);
    add_warnings(form.warnings);
    const auto report = check_coercivity(form, num.trials, num.seed);
    holds = report.holds;
    result = {{"c1_hat", number(form.c1_hat)}, {"C1_hat", number(form.C1_hat)},
              {"l2_shift", number(report.l2_shift)}, {"holds", report.holds}};
    if (report.warning) result["warning"] = *report.warning;
    if (report.holds) result["gamma"] = number(find_shift_gamma(form));
  } else if (options_.which == "boundedness") {
    const DiscreteSpace sp = build_space(mesh, problem_.bc);
    const AssembledForm form = assemble_form(sp, problem_);
    const auto report = check_boundedness(form, num.trials, num.seed);
    result = {{"empirical", number(report.empirical)}};
    result["formula"] = report.formula ? number(*report.formula) : Json("unavailable");
    if (report.formula) holds = report.empirical <= *report.formula * (1.0 + 1e-10);
    result["holds"] = holds;
  } else {
    throw Error(ErrorKind::InvalidRequest, "unknown check '" + options_.which + "'");
  }
  result["check"] = options_.which;
  emit(envelope("check", std::move(result)), {});
  return holds ? kExitOk : kExitNegative;
}

int Session::poincare() {
  const auto& num = problem_.numerics;
  const int trials = options_.trials > 0 ? options_.trials : num.trials;
  const Mesh mesh = build_mesh(problem_);
  InequalityReport report;
  if (options_.kind == "global") {
    report = estimate_global_poincare(build_space(mesh, BoundaryKind::Neumann), problem_.Q, options_.r,
                                      problem_.exponents.omega, trials, num.seed);
  } else if (options_.kind == "sobolev") {
    report = estimate_global_sobolev(build_space(mesh, BoundaryKind::Dirichlet), problem_.Q,
                                     problem_.exponents.sigma, trials, num.seed);
  } else if (options_.kind == "local") {
    std::vector<Ball> balls;
    for (const auto& text : options_.balls) {
      std::vector<double> parts;
      std::stringstream ss(text);
      std::string item;
      while (std::getline(ss, item, ',')) {
        try {
          std::size_t used = 0;
          parts.push_back(std::stod(item, &used));
        } catch (const std::exception&) {
          throw Error(ErrorKind::InvalidInput, "ball must be 'cx,r' or 'cx,cy,r': " + text);
        }
      }
      const auto dim = static_cast<std::size_t>(mesh.dimension());
      if (parts.size() != dim + 1) throw Error(ErrorKind::InvalidInput, "ball must be 'cx,r' or 'cx,cy,r': " + text);
      Ball b;
      b.center[0] = parts[0];
      if (dim == 2) b.center[1] = parts[1];
      b.radius = parts.back();
      balls.push_back(b);
    }
    if (balls.empty()) {
      const Box& box = mesh.domain();
      Ball b;
      b.center = {(box.x0 + box.x1) / 2.0, (box.y0 + box.y1) / 2.0};
      double half = (box.x1 - box.x0) / 2.0;
      if (mesh.dimension() == 2) half = std::min(half, (box.y1 - box.y0) / 2.0);
      b.radius = half / (2.0 * options_.beta);
      balls.push_back(b);
    }
    report = estimate_local_poincare(build_space(mesh, BoundaryKind::Neumann), problem_.Q, balls, options_.beta,
                                     trials, num.seed);
  } else {
    throw Error(ErrorKind::InvalidRequest, "unknown poincare kind '" + options_.kind + "'");
  }
  add_warnings(report.notes);
  emit(envelope("poincare", to_json(report)), {});
  return report.holds ? kExitOk : kExitNegative;
}

int Session::convergence() {
  std::vector<int> resolutions = options_.resolutions;
  if (resolutions.empty()) {
    const int n = problem_.domain.nx;
    resolutions = {n, 2 * n, 4 * n};
  }
  const int k = options_.k > 0 ? options_.k : problem_.numerics.eigen_count;
  const ConvergenceTable table = eigenvalue_convergence(problem_, resolutions, k);
  emit(envelope("convergence", to_json(table)), {});
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options opt;
  CLI::App app{"Degenerate elliptic operators: Fredholm solves, spectra and inequality checks", "degell"};
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("spec", opt.spec_path, "problem file")->required();
    sub->add_option("--out", opt.out_prefix, "write PREFIX.json and companion files");
  };
  auto* solve = app.add_subcommand("solve", "Fredholm or shifted solve");
  add_common(solve);
  auto* mu = solve->add_option("--mu", opt.mu, "solve the shifted problem with this L2 shift");
  solve->add_flag("--export", opt.export_matrices, "also write mesh JSON and COO matrices");

  auto* spectrum = app.add_subcommand("spectrum", "smallest eigenpairs");
  add_common(spectrum);
  spectrum->add_option("--k", opt.k, "number of eigenpairs")->check(CLI::PositiveNumber);
  spectrum->add_flag("--recursion", opt.recursion, "cross-check with the Rayleigh recursion");

  auto* check = app.add_subcommand("check", "hypothesis and conclusion checks");
  add_common(check);
  check->add_option("--which", opt.which,
                    "cond1_i | cond1_ii | cond2_i | cond2_ii | uniqueness | maxprinciple | subunit | "
                    "selfadjoint | coercivity | boundedness")
      ->required();
  check->add_option("--trials", opt.trials)->check(CLI::PositiveNumber);
  auto* seed = check->add_option("--seed", opt.seed);

  auto* poincare = app.add_subcommand("poincare", "Poincare and Sobolev constants");
  add_common(poincare);
  poincare->add_option("--r", opt.r, "integrability exponent of the mean-zero part");
  poincare->add_option("--kind", opt.kind)->check(CLI::IsMember({"global", "sobolev", "local"}));
  poincare->add_option("--ball", opt.balls, "ball as cx,r or cx,cy,r (repeatable)");
  poincare->add_option("--beta", opt.beta, "dilation of the gradient ball");
  poincare->add_option("--trials", opt.trials)->check(CLI::PositiveNumber);

  auto* convergence = app.add_subcommand("convergence", "eigenvalue convergence study");
  add_common(convergence);
  convergence->add_option("--resolutions", opt.resolutions)->delimiter(',');
  convergence->add_option("--k", opt.k)->check(CLI::PositiveNumber);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitError;
  }
  opt.has_mu = mu->count() > 0;
  opt.has_seed = seed->count() > 0;

  try {
    Session session(opt, out);
    if (solve->parsed()) return session.solve();
    if (spectrum->parsed()) return session.spectrum();
    if (check->parsed()) return session.check();
    if (poincare->parsed()) return session.poincare();
    return session.convergence();
  } catch (const ParseError& e) {
    err << opt.spec_path << ":" << e.line() << ":" << e.column() << ": parse error: " << e.detail() << '\n';
  } catch (const Error& e) {
    err << "degell: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "degell: unexpected failure: " << e.what() << '\n';
  }
  return kExitError;
}

}  // namespace degell
