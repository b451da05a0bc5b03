#pragma once

// Run configuration files (YAML) and the configuration-driven runner.

#include <cstddef>
#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "torus3/equation.hpp"
#include "torus3/experiments.hpp"
#include "torus3/solver.hpp"

namespace torus3 {

enum class ExperimentKind { Solve, BonaSmith, Smoothing, BackwardProbe, Dichotomy };
std::string_view experiment_kind_name(ExperimentKind k);

struct RunConfig {
  // Either a catalog name, or an inline definition (f_text non-empty).
  std::string equation_name = "kdv_burgers";
  std::string f_text;
  std::map<std::string, std::string> coefficients;
  std::string dealias = "three_halves";

  std::size_t grid_size = 256;
  DataSpec data;
  SolveParams solve;

  ExperimentKind kind = ExperimentKind::Solve;
  double k = 10.0;
  std::vector<int> m_values = {4, 8, 16, 32};
  bool eps_only_fit = true;
  std::vector<double> offsets = {1.0, 2.0};
  std::vector<std::size_t> resolutions = {64, 128, 256};
  double backward_eps = 1e-6;
  double backward_dt = 1e-5;

  std::string output_dir = "runs";
  unsigned threads = 1;

  /// Resolves the equation.  Throws ConfigError("equation", ...).
  Equation equation() const;
};

/// Parses YAML text.  Unknown keys, wrong types, non-finite numbers and
/// unresolvable references raise ConfigError naming the field path.
RunConfig parse_config(std::string_view yaml_text);
RunConfig load_config(const std::filesystem::path& path);

/// Every option with its default value, as a YAML document.
std::string default_config_yaml();

/// Canonical YAML rendering of a configuration (used for fingerprints).
std::string config_to_yaml(const RunConfig& config);

struct RunOptions {
  unsigned threads = 0;  ///< 0 keeps the configured value
  bool strict = false;
};

struct RunOutcome {
  std::filesystem::path run_dir;
  std::vector<ExperimentReport> reports;
  bool verdict_failed = false;
};

/// Executes the configured experiment and writes its run directory.
RunOutcome run_config(const RunConfig& config, const RunOptions& options, std::ostream& log);

/// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;
inline constexpr int kExitVerdict = 4;

/// Loads, runs and reports; maps errors to the exit codes above.
int run(const std::filesystem::path& config_path, const RunOptions& options, std::ostream& out, std::ostream& err);

}  // namespace torus3
