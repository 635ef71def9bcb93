#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "chemlab/harness.hpp"

using namespace chemlab;
namespace fs = std::filesystem;

namespace {

const char* kRadial = R"(
# minimal radial document
model.chi = 0.1
model.lambda = 1
model.mu = 1
model.gamma = 1.8
domain.kind = radial
domain.radius = 1
domain.n = 3
)";

std::string critical_doc(const std::string& extra = "") {
  return std::string(R"(
domain.kind = radial
domain.radius = 1
domain.n = 3
domain.cells = 64
model.chi = 0.1
model.lambda = 1
model.mu = 1.01
model.c = 0
model.gamma = critical
initial.u.kind = constant
initial.u.value = 0.2387324146378430
initial.v.kind = constant
initial.v.value = 0.5
)") + extra;
}

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("chemlab_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

}  // namespace

TEST(Config, MinimalRadialDocument) {
  const auto cfg = config::parse_config(kRadial);
  EXPECT_EQ(cfg.domain.kind, DomainKind::RadialBall);
  EXPECT_NEAR(cfg.domain.measure(), 4.18879020478639098, 1e-12);
  EXPECT_EQ(cfg.model.n, 3);
  EXPECT_EQ(cfg.resolution, std::vector<std::size_t>{128});
  EXPECT_DOUBLE_EQ(cfg.C_GN, 1.0);
  EXPECT_DOUBLE_EQ(cfg.monitor_p, 2.0);
}

TEST(Config, ValidationErrorsNameTheField) {
  try {
    config::parse_config(std::string(kRadial) + "model.mu = 0\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("duplicate key 'model.mu'"), std::string::npos);
  }
  std::string doc = kRadial;
  doc.replace(doc.find("model.mu = 1"), 12, "model.mu = 0");
  try {
    config::parse_config(doc);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_STREQ(e.what(), "mu must be positive");
  }
}

TEST(Config, UnknownKeyIsHardErrorWithLine) {
  try {
    config::parse_config(std::string(kRadial) + "model.xi = 3\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("model.xi"), std::string::npos);
    EXPECT_EQ(e.line(), 10);
  }
}

TEST(Config, ParseErrorsCarryLineNumbers) {
  try {
    config::parse_document("a = 1\nbroken line\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 2);
  }
  EXPECT_THROW(config::parse_document("a =\n"), ConfigError);
  EXPECT_THROW(config::parse_config(std::string(kRadial) + "solver.t_end = abc\n"), ConfigError);
  EXPECT_THROW(config::parse_config("model.chi = 1\n"), ValidationError);
}

TEST(Config, CriticalKeywordAndBroadcastCells) {
  const auto cfg = config::parse_config(
      "domain.kind = box3\ndomain.cells = 8\nmodel.chi = 1\nmodel.lambda = 1\nmodel.mu = 1\nmodel.gamma = critical\n");
  EXPECT_DOUBLE_EQ(cfg.model.gamma, 1.5);
  EXPECT_EQ(cfg.resolution, (std::vector<std::size_t>{8, 8, 8}));
}

TEST(Check, StrictRangeIsCovered) {
  std::ostringstream out;
  const auto r = harness::cmd_check(config::parse_config(kRadial), out);
  EXPECT_EQ(r.code, harness::ExitCode::Ok);
  EXPECT_NE(out.str().find("(A1): covered"), std::string::npos);
}

TEST(Check, UncoveredGamma) {
  std::string doc = kRadial;
  doc.replace(doc.find("model.gamma = 1.8"), 17, "model.gamma = 1.2");
  std::ostringstream out;
  harness::cmd_check(config::parse_config(doc), out);
  EXPECT_NE(out.str().find("uncovered: theorem silent"), std::string::npos);
}

TEST(Check, CriticalPrintsConstantsAndSearch) {
  // u0 mass = 0.2387·4π/3 = 1, λ|Ω|/μ > 1 so M = (λ/μ)|Ω|; c = 0 makes M irrelevant.
  std::ostringstream out;
  const auto r = harness::cmd_check(config::parse_config(critical_doc()), out);
  EXPECT_EQ(r.code, harness::ExitCode::Ok);
  const std::string s = out.str();
  EXPECT_NE(s.find("(A2): satisfied"), std::string::npos);
  for (const char* key : {"K1(n/2,n)", "K2(n/2,n,0)", "F =", "K =", "lhs =", "rhs =", "M =", "p =", "eta ="})
    EXPECT_NE(s.find(key), std::string::npos) << key;
  ASSERT_TRUE(r.search.has_value());
  EXPECT_GT(r.search->p, 1.5);

  std::ostringstream js;
  const auto j = harness::cmd_check(config::parse_config(critical_doc()), js, true);
  const auto parsed = nlohmann::json::parse(js.str());
  EXPECT_EQ(parsed["verdict"], "(A2): satisfied");
  EXPECT_TRUE(parsed["a2"]["satisfied"].get<bool>());
}

TEST(Check, DimensionBelowThreeIsScopeError) {
  const auto cfg = config::parse_config(
      "domain.kind = interval\nmodel.chi = 1\nmodel.lambda = 1\nmodel.mu = 1\nmodel.gamma = 1.8\n");
  std::ostringstream out;
  const auto r = harness::cmd_check(cfg, out);
  EXPECT_EQ(r.code, harness::ExitCode::Scope);
  EXPECT_NE(out.str().find("n >= 3"), std::string::npos);
}

TEST(Simulate, HeatVerificationWritesOutputs) {
  const fs::path dir = scratch_dir("heat");
  const auto cfg = config::parse_config(
      "domain.kind = interval\ndomain.cells = 256\nmodel.chi = 1\nmodel.lambda = 1\nmodel.mu = 1\n"
      "model.gamma = 1.5\nsolver.t_end = 0.1\nsolver.record_every = 0.01\noutput.svg = true\noutput.dir = " +
      dir.string() + "\n");
  std::ostringstream log;
  const auto r = harness::cmd_simulate(cfg, {true}, log);
  EXPECT_EQ(r.code, harness::ExitCode::Ok) << log.str();
  ASSERT_TRUE(r.heat_error.has_value());
  EXPECT_LE(*r.heat_error, 5e-4);
  const std::string diag = slurp(dir / "diagnostics.csv");
  EXPECT_EQ(diag.substr(0, diag.find('\n')), monitors::csv_header());
  EXPECT_EQ(std::count(diag.begin(), diag.end(), '\n'), 12);
  const std::string fin = slurp(dir / "final_state.csv");
  EXPECT_EQ(fin.substr(0, fin.find('\n')), "index,x,u,v");
  EXPECT_NE(slurp(dir / "plot.svg").find("<polyline"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Simulate, HeatVerificationNeedsInterval) {
  const auto cfg = config::parse_config(std::string(kRadial) + "output.dir = " + scratch_dir("x").string() + "\n");
  std::ostringstream log;
  EXPECT_EQ(harness::cmd_simulate(cfg, {true}, log).code, harness::ExitCode::Usage);
}

TEST(Simulate, BlowupExitCode) {
  const fs::path dir = scratch_dir("blowup");
  const auto cfg = config::parse_config(
      "domain.kind = interval\ndomain.cells = 16\nmodel.chi = 0.1\nmodel.lambda = 5\nmodel.mu = 0.1\n"
      "model.gamma = 2\ninitial.u.kind = constant\ninitial.u.value = 0.9\nsolver.t_end = 1\n"
      "solver.blowup_threshold = 1\noutput.dir = " +
      dir.string() + "\n");
  std::ostringstream log;
  EXPECT_EQ(harness::cmd_simulate(cfg, {}, log).code, harness::ExitCode::Blowup);
  fs::remove_all(dir);
}

TEST(Simulate, FilesystemErrorNamesPath) {
  const fs::path blocker = scratch_dir("blocker");
  { std::ofstream(blocker) << "x"; }
  const auto cfg = config::parse_config(
      "domain.kind = interval\ndomain.cells = 16\nmodel.chi = 0.1\nmodel.lambda = 1\nmodel.mu = 1\n"
      "model.gamma = 2\nsolver.t_end = 0.01\noutput.dir = " +
      (blocker / "sub").string() + "\n");
  std::ostringstream log;
  const auto r = harness::cmd_simulate(cfg, {}, log);
  EXPECT_EQ(r.code, harness::ExitCode::Filesystem);
  EXPECT_NE(r.message.find((blocker / "sub").string()), std::string::npos);
  fs::remove(blocker);
}

TEST(Simulate, CsvBitStable) {
  auto run = [](const fs::path& dir) {
    const auto cfg = config::parse_config(
        "domain.kind = radial\ndomain.cells = 32\nmodel.chi = 0.5\nmodel.lambda = 1\nmodel.mu = 1\n"
        "model.c = 0.1\nmodel.gamma = 1.8\nsolver.t_end = 0.2\nsolver.record_every = 0.05\noutput.dir = " +
        dir.string() + "\n");
    std::ostringstream log;
    EXPECT_EQ(harness::cmd_simulate(cfg, {}, log).code, harness::ExitCode::Ok) << log.str();
    return slurp(dir / "diagnostics.csv") + slurp(dir / "final_state.csv");
  };
  const fs::path a = scratch_dir("stable_a"), b = scratch_dir("stable_b");
  EXPECT_EQ(run(a), run(b));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Sweep, AxisParsing) {
  const auto a = harness::parse_axis("model.mu=0.1:2:20");
  EXPECT_EQ(a.key, "model.mu");
  ASSERT_EQ(a.values.size(), 20u);
  EXPECT_DOUBLE_EQ(a.values.front(), 0.1);
  EXPECT_DOUBLE_EQ(a.values.back(), 2.0);
  EXPECT_THROW(harness::parse_axis("domain.kind=0:1:3"), ValidationError);
  EXPECT_THROW(harness::parse_axis("model.mu=0:1:0"), ValidationError);
  EXPECT_THROW(harness::parse_axis("model.mu=0:1"), ValidationError);
  std::ostringstream out;
  EXPECT_THROW(harness::cmd_sweep(config::parse_document(critical_doc()), {{"model.mu", {}}}, out),
               ValidationError);
}

TEST(Sweep, MuFlipAtThresholdWhenCIsZero) {
  const auto doc = config::parse_document(critical_doc());
  const auto axis = harness::parse_axis("model.mu=0.1:2:96");
  std::ostringstream out;
  const auto rows = harness::cmd_sweep(doc, {axis}, out);
  const double step = axis.values[1] - axis.values[0];
  int flips = 0;
  double flip_at = 0;
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (*rows[i].satisfied != *rows[i - 1].satisfied) {
      ++flips;
      flip_at = rows[i].values[0];
    }
  EXPECT_EQ(flips, 1);
  EXPECT_NEAR(flip_at, 1.0022231909496682, step);
  EXPECT_EQ(rows.front().regime, conditions::Regime::B1ZeroC);
  const std::string csv = out.str();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "model.mu,lhs,rhs,satisfied,regime");
}

TEST(Sweep, CFlipConsistentWithMassBound) {
  // μ below the threshold and ∫u0 > λ|Ω|/μ so that M = ∫u0.
  const auto doc = config::parse_document(critical_doc());
  auto d = doc;
  d.set("model.mu", "0.5");
  d.set("model.lambda", "0.1");
  d.set("initial.u.value", "1.0");
  const auto axis = harness::parse_axis("model.c=0.01:10:60");
  std::ostringstream out;
  const auto rows = harness::cmd_sweep(d, {axis}, out);
  int flips = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) flips += *rows[i].satisfied != *rows[i - 1].satisfied;
  EXPECT_EQ(flips, 1);
  const auto cfg = config::interpret(d);
  const auto res = harness::resolve(cfg);
  for (const auto& r : rows) {
    auto m = cfg.model;
    m.c = r.values[0];
    const auto rem = conditions::remark_regimes(m, res.initial.v0_sup, res.initial.u0_mass, res.measure, 1.0);
    EXPECT_EQ(rem.regime, conditions::Regime::B2MassBound);
    EXPECT_EQ(rem.satisfied, r.satisfied);
  }
}

TEST(Sweep, TwoAxesRowMajor) {
  std::ostringstream out;
  const auto rows = harness::cmd_sweep(config::parse_document(critical_doc()),
                                       {harness::parse_axis("model.mu=0.5:1.5:3"), harness::parse_axis("model.chi=0.1:0.2:2")},
                                       out);
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_DOUBLE_EQ(rows[1].values[0], 0.5);
  EXPECT_DOUBLE_EQ(rows[1].values[1], 0.2);
}

TEST(Inequality, RandomCosineSeries) {
  std::ostringstream out;
  EXPECT_EQ(harness::cmd_inequality(1.0, 256, 10, 1, 0.95, out), harness::ExitCode::Ok);
  EXPECT_NE(out.str().find("min ratio"), std::string::npos);
}
