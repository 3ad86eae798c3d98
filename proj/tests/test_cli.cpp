#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "degell/cli.hpp"

namespace degell {
namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

std::string fixture(const std::string& name) { return (fs::path(DEGELL_FIXTURES) / (name + ".spec")).string(); }

CliRun run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliFiles : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("degell_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

TEST(Cli, CompatibleSolveExitsZero) {
  const CliRun r = run({"solve", fixture("neumann_cos")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["command"], "solve");
  EXPECT_EQ(j["result"]["outcome"]["branch"], "alternative");
  EXPECT_EQ(j["result"]["outcome"]["compatible"], true);
}

TEST(Cli, IncompatibleSolveExitsTwo) {
  const CliRun r = run({"solve", fixture("neumann_one")});
  EXPECT_EQ(r.code, kExitNegative);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["result"]["outcome"]["compatible"], false);
}

TEST(Cli, ParseErrorReportsPosition) {
  const CliRun r = run({"solve", fixture("bad_expression")});
  EXPECT_EQ(r.code, kExitError);
  EXPECT_NE(r.err.find("bad_expression.spec:8:5: parse error"), std::string::npos) << r.err;
  EXPECT_TRUE(r.out.empty());
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, kExitError);
  EXPECT_EQ(run({"frobnicate"}).code, kExitError);
  EXPECT_EQ(run({"solve"}).code, kExitError);
  EXPECT_EQ(run({"solve", "/nonexistent/problem.spec"}).code, kExitError);
  EXPECT_EQ(run({"check", fixture("neumann_cos"), "--which", "nonsense"}).code, kExitError);
  EXPECT_EQ(run({"solve", fixture("neumann_cos"), "--export"}).code, kExitError);
}

TEST(Cli, ChecksMapToExitCodes) {
  EXPECT_EQ(run({"check", fixture("reaction_positive"), "--which", "cond1_i"}).code, kExitOk);
  EXPECT_EQ(run({"check", fixture("reaction_negative"), "--which", "cond1_i"}).code, kExitNegative);
  EXPECT_EQ(run({"check", fixture("reaction_positive"), "--which", "uniqueness"}).code, kExitOk);
  EXPECT_EQ(run({"check", fixture("parabola"), "--which", "maxprinciple"}).code, kExitOk);
  EXPECT_EQ(run({"check", fixture("parabola_corrupted"), "--which", "maxprinciple"}).code, kExitError);
  EXPECT_EQ(run({"check", fixture("grushin_dirichlet"), "--which", "maxprinciple"}).code, kExitOk);
}

TEST(Cli, RecursionNeedsSelfAdjointProblem) {
  EXPECT_EQ(run({"spectrum", fixture("drift"), "--recursion"}).code, kExitError);
  const CliRun ok = run({"spectrum", fixture("dirichlet_laplacian"), "--recursion"});
  ASSERT_EQ(ok.code, kExitOk) << ok.err;
  EXPECT_EQ(nlohmann::json::parse(ok.out)["result"]["recursion"]["agree"], true);
}

TEST(Cli, PoincareAndConvergence) {
  const CliRun p = run({"poincare", fixture("neumann_cos"), "--r", "2"});
  ASSERT_EQ(p.code, kExitOk) << p.err;
  EXPECT_NEAR(nlohmann::json::parse(p.out)["result"]["constant"].get<double>(), 1.0, 1e-4);
  const CliRun c = run({"convergence", fixture("dirichlet_laplacian"), "--resolutions", "10,20,40", "--k", "2"});
  ASSERT_EQ(c.code, kExitOk) << c.err;
}

TEST(Cli, RerunsAreByteIdentical) {
  for (const std::vector<std::string>& args :
       {std::vector<std::string>{"check", fixture("reaction_negative"), "--which", "cond1_i"},
        std::vector<std::string>{"poincare", fixture("grushin_neumann"), "--r", "3", "--trials", "20"},
        std::vector<std::string>{"spectrum", fixture("grushin_neumann"), "--k", "3"}}) {
    const CliRun a = run(args);
    const CliRun b = run(args);
    EXPECT_EQ(a.code, b.code);
    EXPECT_EQ(a.out, b.out);
    EXPECT_FALSE(a.out.empty());
  }
}

TEST(Cli, SeedPrecedence) {
  const std::vector<std::string> base{"check", fixture("reaction_negative"), "--which", "cond1_i"};
  auto seed_of = [](const CliRun& r) { return nlohmann::json::parse(r.out)["result"]["seed"].get<std::uint64_t>(); };
  const std::uint64_t spec_seed = seed_of(run(base));
  ::setenv("DEGELL_SEED", "77", 1);
  const std::uint64_t env_seed = seed_of(run(base));
  auto with_flag = base;
  with_flag.insert(with_flag.end(), {"--seed", "5"});
  const std::uint64_t flag_seed = seed_of(run(with_flag));
  ::setenv("DEGELL_SEED", "not-a-number", 1);
  const int bad = run(base).code;
  ::unsetenv("DEGELL_SEED");
  EXPECT_EQ(env_seed, 77u);
  EXPECT_EQ(flag_seed, 5u);
  EXPECT_NE(spec_seed, 77u);
  EXPECT_EQ(bad, kExitError);
}

TEST_F(CliFiles, OutWritesJsonAndSolution) {
  const std::string prefix = (dir_ / "run").string();
  const CliRun r = run({"solve", fixture("neumann_cos"), "--out", prefix});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_TRUE(r.out.empty());
  const auto j = nlohmann::json::parse(slurp(prefix + ".json"));
  EXPECT_EQ(j["command"], "solve");
  const std::string csv = slurp(prefix + "_solution.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "vertex,x,value");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 202);
}

TEST_F(CliFiles, ExportWritesMatrices) {
  const std::string prefix = (dir_ / "exp").string();
  const CliRun r = run({"solve", fixture("reaction_positive"), "--export", "--out", prefix});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  for (const char* suffix : {".json", "_mesh.json", "_A.coo", "_M.coo", "_Gq.coo", "_rhs.csv", "_solution.csv"}) {
    EXPECT_TRUE(fs::exists(prefix + suffix)) << suffix;
  }
  std::istringstream coo(slurp(prefix + "_M.coo"));
  int i = 0, j = 0;
  double v = 0.0;
  double total = 0.0;
  while (coo >> i >> j >> v) total += v;
  EXPECT_NEAR(total, 1.0, 1e-12);  // sum of the mass matrix is the length of (0, 1)
}

TEST_F(CliFiles, SpectrumWritesEigenfunctions) {
  const std::string prefix = (dir_ / "eig").string();
  const CliRun r = run({"spectrum", fixture("dirichlet_laplacian"), "--k", "2", "--out", prefix});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_TRUE(fs::exists(prefix + "_eigfn_1.csv"));
  EXPECT_TRUE(fs::exists(prefix + "_eigfn_2.csv"));
}

}  // namespace
}  // namespace degell
