#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "torus3/config.hpp"
#include "torus3/errors.hpp"
#include "torus3/io.hpp"

using namespace torus3;
namespace fs = std::filesystem;

namespace {

std::string config_error_field(const std::string& yaml) {
  try {
    parse_config(yaml);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<no error>";
}

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("torus3_test_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write_config(const std::string& yaml, const std::string& name = "config.yaml") {
    const fs::path p = dir_ / name;
    std::ofstream(p) << yaml;
    return p;
  }

  std::string small_solve(const std::string& extra = "") const {
    return "equation: kdv_burgers\ngrid_size: 32\ndata:\n  terms:\n    - {mode: 1, cos: 0.5}\n"
           "solve: {eps: 0.01, dt: 0.001, t_end: 0.005, snapshot_stride: 2}\noutput_dir: " +
           (dir_ / "runs").string() + "\n" + extra;
  }

  fs::path dir_;
};

}  // namespace

TEST(Config, FieldPathsInErrors) {
  EXPECT_EQ(config_error_field("equation: nosuch"), "equation");
  EXPECT_EQ(config_error_field("equation: {F: 'w3 +'}"), "equation");
  EXPECT_EQ(config_error_field("bogus: 1"), "bogus");
  EXPECT_EQ(config_error_field("solve: {dt: -1}"), "solve.dt");
  EXPECT_EQ(config_error_field("solve: {dt: .nan}"), "solve.dt");
  EXPECT_EQ(config_error_field("solve: {scheme: rk45}"), "solve.scheme");
  EXPECT_EQ(config_error_field("solve: {picard: {half_nodes: 0}}"), "solve.picard.half_nodes");
  EXPECT_EQ(config_error_field("data: {tail: {exponent: 10.55}}"), "data.tail.seed");
  EXPECT_EQ(config_error_field("data: {terms: [{mode: 0, cos: 1}]}"), "data.terms[0].mode");
  EXPECT_EQ(config_error_field("grid_size: 7"), "grid_size");
  EXPECT_EQ(config_error_field("experiment: {kind: magic}"), "experiment.kind");
  EXPECT_EQ(config_error_field("experiment: {m_values: [4, x]}"), "experiment.m_values[1]");
  EXPECT_EQ(config_error_field("threads: 0"), "threads");
}

TEST(Config, MessageNamesField) {
  try {
    parse_config("equation: nosuch");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("'equation'"), std::string::npos);
  }
}

TEST(Config, InlineEquationAndCoefficients) {
  const auto c = parse_config(R"yaml(
equation:
  name: slow_kdv
  F: -a*w3 - 6*w0*w1
  coefficients: {a: "1 + 0.5*cos(x)"}
  dealias: double
)yaml");
  const auto eq = c.equation();
  EXPECT_EQ(eq.name(), "slow_kdv");
  EXPECT_EQ(eq.dealias(), Dealias::Double);
  EXPECT_DOUBLE_EQ(eq.partial(Var::W3).evaluate({0, 0, 0, 0, 0.0, 0}), -1.5);
}

TEST(Config, DefaultsRoundTrip) {
  const std::string text = default_config_yaml();
  const auto c = parse_config(text);
  EXPECT_EQ(config_to_yaml(c), text);
  EXPECT_EQ(c.equation_name, "kdv_burgers");
  EXPECT_EQ(c.grid_size, 256u);
  EXPECT_EQ(c.m_values, (std::vector<int>{4, 8, 16, 32}));
  for (const char* key : {"solve:", "experiment:", "output_dir:", "threads:", "picard:"})
    EXPECT_NE(text.find(key), std::string::npos) << key;
}

TEST(Config, ShippedConfigsParse) {
  for (const auto& entry : fs::directory_iterator(fs::path(TORUS3_SOURCE_DIR) / "configs")) {
    if (entry.path().extension() != ".yaml") continue;
    EXPECT_NO_THROW(load_config(entry.path())) << entry.path();
  }
}

TEST(Catalog, ListingContents) {
  const std::string s = list_catalog();
  auto line_of = [&](const std::string& name) {
    std::istringstream in(s);
    std::string line;
    while (std::getline(in, line))
      if (line.rfind(name + " ", 0) == 0) return line;
    return std::string();
  };
  const auto kdv = line_of("kdv");
  EXPECT_NE(kdv.find("P = 0"), std::string::npos);
  EXPECT_NE(kdv.find("non-parabolic"), std::string::npos);
  const auto kdvb = line_of("kdv_burgers");
  EXPECT_NE(kdvb.find("parabolic"), std::string::npos);
  EXPECT_EQ(kdvb.find("non-parabolic"), std::string::npos);
  EXPECT_NE(line_of("harry_dym").find("P = 18 f² ∂_x f"), std::string::npos);
  EXPECT_NE(line_of("k22").find("P = 18 ∂_x f"), std::string::npos);
  for (const char* name : {"transition_kdv", "var_kdv"}) EXPECT_FALSE(line_of(name).empty()) << name;
}

TEST_F(TempDir, RunWritesValidDirectory) {
  std::ostringstream log;
  const auto outcome = run_config(parse_config(small_solve()), {}, log);
  const fs::path d = outcome.run_dir;
  EXPECT_EQ(d.filename(), "run-0001");
  for (const char* f : {"meta.json", "report.json", "config.yaml", "trajectories/main/norms.csv",
                        "trajectories/main/meta.json", "trajectories/main/snap_0.json", "energy_monitor.json",
                        "tables/energy_monitor_energy.csv", "plots/energy_monitor_0_energy.svg"})
    EXPECT_TRUE(fs::exists(d / f)) << f;
  const auto v = validate_run_directory(d);
  EXPECT_TRUE(v.ok);
  EXPECT_TRUE(v.problems.empty());

  std::ifstream csv(d / "trajectories/main/norms.csv");
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "t,h_k0,h_k,energy,delta,delta_prime,q_min,mean");

  // Append-only: a second run gets a fresh directory.
  EXPECT_EQ(run_config(parse_config(small_solve()), {}, log).run_dir.filename(), "run-0002");
}

TEST_F(TempDir, TamperingIsDetected) {
  std::ostringstream log;
  const fs::path d = run_config(parse_config(small_solve()), {}, log).run_dir;
  std::ofstream(d / "trajectories/main/norms.csv", std::ios::app) << "0,0,0,0,0,0,0,0\n";
  auto v = validate_run_directory(d);
  EXPECT_FALSE(v.ok);
  ASSERT_FALSE(v.problems.empty());
  EXPECT_NE(v.problems[0].find("norms.csv"), std::string::npos);
  fs::remove(d / "trajectories/main/snap_0.json");
  v = validate_run_directory(d);
  EXPECT_GE(v.problems.size(), 2u);
  EXPECT_FALSE(validate_run_directory(dir_ / "nowhere").ok);
}

TEST_F(TempDir, ExitCodes) {
  std::ostringstream out, err;
  EXPECT_EQ(run(write_config(small_solve(), "ok.yaml"), {}, out, err), kExitOk);
  EXPECT_EQ(run(write_config("equation: nosuch\n", "bad.yaml"), {}, out, err), kExitConfig);
  EXPECT_NE(err.str().find("equation"), std::string::npos);
  EXPECT_EQ(run(dir_ / "missing.yaml", {}, out, err), kExitConfig);

  // The output root is an existing file: the run directory cannot be created.
  std::ofstream(dir_ / "blocker") << "x";
  const std::string blocked = "equation: kdv\ngrid_size: 16\nsolve: {eps: 0.01, dt: 0.001, t_end: 0.002}\n"
                              "output_dir: " + (dir_ / "blocker").string() + "\n";
  EXPECT_EQ(run(write_config(blocked, "blocked.yaml"), {}, out, err), kExitRuntime);

  // Large data on a coarse grid: the gauged energy exceeds its bound.
  const std::string failing = "equation: kdv_burgers\ngrid_size: 32\ndata:\n  terms:\n    - {mode: 1, cos: 2.0}\n"
                              "solve: {eps: 0.01, dt: 0.001, t_end: 0.05}\noutput_dir: " +
                              (dir_ / "runs").string() + "\n";
  const auto path = write_config(failing, "failing.yaml");
  EXPECT_EQ(run(path, {0, false}, out, err), kExitOk);
  EXPECT_EQ(run(path, {0, true}, out, err), kExitVerdict);
}

#ifdef TORUS3_CLI_PATH
TEST_F(TempDir, CommandLineTool) {
  const std::string exe = TORUS3_CLI_PATH;
  auto status = [](const std::string& cmd) {
    const int s = std::system((cmd + " > /dev/null 2>&1").c_str());
    return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
  };
  EXPECT_EQ(status(exe + " list-catalog"), 0);
  EXPECT_EQ(status(exe + " --print-defaults"), 0);
  EXPECT_EQ(status(exe + " check-identity --eq k22 --kprime 10 --seed 7"), 0);
  EXPECT_EQ(status(exe + " check-identity --eq nosuch"), kExitConfig);
  EXPECT_EQ(status(exe + " run " + write_config(small_solve()).string()), 0);
  EXPECT_EQ(status(exe + " verify " + (dir_ / "runs" / "run-0001").string()), 0);
  EXPECT_EQ(status(exe + " verify " + (dir_ / "runs" / "run-0009").string()), kExitVerdict);
  EXPECT_EQ(status(exe + " --bogus"), kExitConfig);
}
#endif
