#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nhmech/run.hpp"

using namespace nhmech;
using namespace nhmech::cli;
namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

const fs::path kConfigs = fs::path(NHMECH_SOURCE_DIR) / "configs";

// Fresh scratch directory per test.
fs::path scratch() {
  const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
  const fs::path d = fs::temp_directory_path() /
                     ("nhmech_" + std::string(info->name()) + "_" + std::to_string(::getpid()));
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path write_config(const fs::path& dir, const std::string& name, const json& j) {
  const fs::path p = dir / name;
  std::ofstream(p) << j.dump(2);
  return p;
}

json particle_config() {
  return json::parse(R"({
    "system": {"name": "particle", "params": {"h": 0.1}},
    "initial": {"q0": [0.0, 0.0, 0.0], "q1": [0.1, 0.2, 0.01]},
    "steps": 5
  })");
}

struct Captured {
  int code = 0;
  json record;
  std::string log;
};

Captured run(const std::string& cmd, const fs::path& config, const fs::path& out) {
  std::ostringstream o, l;
  RunContext ctx;
  ctx.out_dir = out.string();
  ctx.out = &o;
  ctx.log = &l;
  Captured c;
  c.code = run_command(cmd, config.string(), ctx);
  c.record = json::parse(o.str());
  c.log = l.str();
  return c;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

int nhsim(const std::string& args) {
  const int status = std::system((std::string(NHSIM_PATH) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Cli, ShippedConfigsRoundTrip) {
  int n = 0;
  for (const auto& e : fs::directory_iterator(kConfigs)) {
    if (e.path().extension() != ".json") continue;
    const RunConfig c = load_config(e.path().string());
    EXPECT_EQ(parse_config(to_json(c)), c) << e.path();
    const NhProblem p = build_problem(c);
    EXPECT_NO_THROW(build_element(c, p, c.initial)) << e.path();
    ++n;
  }
  EXPECT_GE(n, 10);
}

TEST(Cli, EverySystemHasAConfig) {
  for (const auto& name : system_names()) {
    bool found = false;
    for (const auto& e : fs::directory_iterator(kConfigs))
      if (e.path().extension() == ".json" && load_config(e.path().string()).system == name) found = true;
    EXPECT_TRUE(found) << name;
  }
}

TEST(Cli, SchemaViolationsAreRejected) {
  auto rejects = [](const std::function<void(json&)>& edit) {
    json j = particle_config();
    edit(j);
    EXPECT_THROW(parse_config(j), ConfigError) << j.dump();
  };
  rejects([](json& j) { j["extra"] = 1; });
  rejects([](json& j) { j["system"]["params"]["mass"] = 1.0; });
  rejects([](json& j) { j["system"]["params"].erase("h"); });
  rejects([](json& j) { j["system"]["params"]["h"] = {0.1, 0.2}; });
  rejects([](json& j) { j["system"]["name"] = "pendulum"; });
  rejects([](json& j) { j["initial"].erase("q1"); });
  rejects([](json& j) { j["initial"]["q0"] = {0.0, 0.0}; });
  rejects([](json& j) { j["steps"] = -1; });
  rejects([](json& j) { j["steps"] = 2.5; });
  rejects([](json& j) { j["solver"] = {{"tolerance", 1e-9}}; });
  rejects([](json& j) { j["output"] = {{"format", "xml"}}; });
  rejects([](json& j) { j["momentum"] = {{"spec", "angular"}}; });
  rejects([](json& j) { j["check"] = {{"points", {{{"q0", {0, 0, 0}}}}}}; });
  EXPECT_NO_THROW(parse_config(particle_config()));
}

TEST(Cli, OffManifoldInitialNeedsProjection) {
  json j = particle_config();
  j["initial"]["q1"] = {0.1, 0.2, 0.5};
  RunConfig c = parse_config(j);
  const NhProblem p = build_problem(c);
  EXPECT_THROW(build_element(c, p, c.initial), ConfigError);
  j["initial"]["project"] = true;
  c = parse_config(j);
  const GroupoidElement g = build_element(c, p, c.initial);
  EXPECT_LT(constraint_violation(p, g), 1e-12);
}

TEST(Cli, ZeroStepsWritesOneRow) {
  const fs::path d = scratch();
  json j = particle_config();
  j["steps"] = 0;
  const Captured r = run("simulate", write_config(d, "c.json", j), d / "out");
  ASSERT_EQ(r.code, kOk);
  const auto rows = csv_rows(slurp(d / "out" / "trajectory.csv"));
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].size(), rows[1].size());
  EXPECT_EQ(r.record["rows"], 1);
}

TEST(Cli, TrajectoryParsesBackExactly) {
  const fs::path d = scratch();
  const fs::path cfg = write_config(d, "c.json", particle_config());
  ASSERT_EQ(run("simulate", cfg, d / "out").code, kOk);
  const auto rows = csv_rows(slurp(d / "out" / "trajectory.csv"));
  const RunConfig c = load_config(cfg.string());
  const NhProblem p = build_problem(c);
  const Trajectory t = evolve(p, build_element(c, p, c.initial), c.steps, c.solver);
  const Vec last = p.groupoid.coordinates(t.elements.back());
  ASSERT_EQ(rows.size(), t.elements.size() + 1);
  const auto names = p.groupoid.coordinate_names();
  for (std::size_t i = 0; i < names.size(); ++i) {
    EXPECT_EQ(rows[0][i], names[i]);
    EXPECT_EQ(std::strtod(rows.back()[i].c_str(), nullptr), last[static_cast<Eigen::Index>(i)]);
  }
  EXPECT_EQ(rows[0].back(), "condition");
  EXPECT_EQ(rows[0][names.size()], "iterations");
  EXPECT_EQ(rows[1][names.size()], "0");
}

TEST(Cli, RerunIsByteIdentical) {
  const fs::path d = scratch();
  const fs::path cfg = kConfigs / "veselova.json";
  ASSERT_EQ(run("simulate", cfg, d / "a").code, kOk);
  ASSERT_EQ(run("simulate", cfg, d / "b").code, kOk);
  EXPECT_EQ(slurp(d / "a" / "trajectory.csv"), slurp(d / "b" / "trajectory.csv"));
  for (const auto& e : fs::directory_iterator(d / "a"))
    EXPECT_NE(e.path().filename().string().front(), '.') << e.path();
}

TEST(Cli, JsonTrajectoryFormat) {
  const fs::path d = scratch();
  json j = particle_config();
  j["output"] = {{"trajectory", "t.json"}, {"format", "json"}};
  ASSERT_EQ(run("simulate", write_config(d, "c.json", j), d).code, kOk);
  const json t = json::parse(slurp(d / "t.json"));
  EXPECT_EQ(t["rows"].size(), 6u);
  EXPECT_EQ(t["columns"].size(), t["rows"][0].size());
}

TEST(Cli, ExitCodes) {
  const fs::path d = scratch();
  EXPECT_EQ(run("simulate", d / "missing.json", d).code, kConfigError);
  std::ofstream(d / "broken.json") << "{\"system\": ";
  EXPECT_EQ(run("simulate", d / "broken.json", d).code, kConfigError);

  const Captured s = run("simulate", kConfigs / "particle_singular.json", d);
  EXPECT_EQ(s.code, kSolveError);
  EXPECT_EQ(s.record["error"], "singular");
  EXPECT_EQ(s.record["step"], 0);
  EXPECT_NE(s.log.find("step 0"), std::string::npos);

  json j = particle_config();
  j["solver"] = {{"max_iters", 1}, {"tol_residual", 1e-300}};
  const Captured n = run("simulate", write_config(d, "nc.json", j), d);
  EXPECT_EQ(n.code, kSolveError);
  EXPECT_EQ(n.record["error"], "no_convergence");

  std::ofstream(d / "a_file") << "x";
  const Captured io = run("simulate", kConfigs / "particle.json", d / "a_file");
  EXPECT_EQ(io.code, kIoError);
  EXPECT_EQ(io.record["status"], "error");

  EXPECT_EQ(run("momentum", kConfigs / "suslov.json", d).code, kConfigError);
}

TEST(Cli, BinaryExitCodes) {
  const fs::path d = scratch();
  const std::string out = " --out " + (d / "o").string();
  EXPECT_EQ(nhsim("simulate --config " + (kConfigs / "particle.json").string() + out), 0);
  EXPECT_TRUE(fs::exists(d / "o" / "trajectory.csv"));
  EXPECT_TRUE(fs::exists(d / "o" / "summary.json"));
  EXPECT_EQ(nhsim("simulate --config " + (d / "nope.json").string() + out), 2);
  EXPECT_EQ(nhsim("simulate" + out), 2);
  EXPECT_EQ(nhsim("frobnicate"), 2);
  EXPECT_EQ(nhsim("simulate --config " + (kConfigs / "particle_singular.json").string() + out), 3);
  std::ofstream(d / "f") << "x";
  EXPECT_EQ(nhsim("simulate --config " + (kConfigs / "particle.json").string() + " --out " +
                  (d / "f").string()),
            4);
}

TEST(Cli, CheckReportsDegeneratePoint) {
  const fs::path d = scratch();
  const Captured r = run("check", kConfigs / "particle.json", d);
  ASSERT_EQ(r.code, kOk);
  EXPECT_EQ(r.record["regular"], false);
  EXPECT_EQ(r.record["legendre_matched"], true);
  const json report = json::parse(slurp(d / "report.json"));
  EXPECT_EQ(report["regularity"][0]["regular"], true);
  EXPECT_EQ(report["regularity"][1]["regular"], false);

  const Captured s = run("check", kConfigs / "suslov.json", d);
  ASSERT_EQ(s.code, kOk);
  EXPECT_EQ(s.record["regular"], true);
  EXPECT_EQ(s.record["reversible"], true);
}

TEST(Cli, MomentumIdentityAndControl) {
  const fs::path d = scratch();
  const Captured free = run("momentum", kConfigs / "particle_xz.json", d);
  ASSERT_EQ(free.code, kOk);
  EXPECT_EQ(free.record["identity_holds"], true);
  const Captured forced = run("momentum", kConfigs / "particle_forced.json", d);
  ASSERT_EQ(forced.code, kOk);
  EXPECT_EQ(forced.record["identity_holds"], false);
  EXPECT_EQ(forced.record["lagrangian_invariant"], false);
}

TEST(Cli, FormatNumberRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0}) {
    const std::string s = format_number(v);
    EXPECT_EQ(std::strtod(s.c_str(), nullptr), v) << s;
  }
}
