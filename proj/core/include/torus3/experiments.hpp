#pragma once

// Numerical experiments built on the solver: mollified families tied to the
// regularization, energy monitoring, smoothing versus backward growth, and
// continuity of the structural coefficients.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "torus3/equation.hpp"
#include "torus3/solver.hpp"
#include "torus3/spectral.hpp"

namespace torus3 {

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add_row(std::vector<double> row);
  /// Throws Error for unknown column names.
  std::vector<double> column(std::string_view name) const;
};

enum class Outcome { Pass, Fail, Inconclusive, IllPosedSignal, DispersiveControl };
std::string_view outcome_name(Outcome o);

struct Verdict {
  std::string criterion;
  Outcome outcome = Outcome::Inconclusive;
  std::string table;  ///< name of the table the verdict is read from
  std::string detail;
};

struct PlotSpec {
  std::string table;
  std::string x;
  std::vector<std::string> ys;
  bool log_x = false;
  bool log_y = false;
  std::string title;
};

struct ExperimentReport {
  std::string kind;
  std::vector<Table> tables;
  std::map<std::string, double> fitted_rates;
  std::vector<Verdict> verdicts;
  std::map<std::string, std::string> provenance;
  std::vector<std::string> notes;
  std::vector<PlotSpec> plots;

  const Table& table(std::string_view name) const;
  Table& add_table(std::string name, std::vector<std::string> columns);
  void add_verdict(std::string criterion, Outcome outcome, std::string table, std::string detail = {});
  /// True when any verdict is Fail.
  bool failed() const;
};

// ---------------------------------------------------------------------------
// Initial data

struct TrigTerm {
  int mode = 1;
  double cos_coeff = 0.0;
  double sin_coeff = 0.0;
};

/// mean + sum (a cos nx + b sin nx), optionally plus a rough tail whose
/// coefficients have modulus amplitude * <n>^{-exponent} and seeded random
/// phases.  Phases are drawn in increasing n, so the low modes do not depend
/// on the grid.
struct DataSpec {
  double mean = 0.0;
  std::vector<TrigTerm> terms;
  std::optional<double> tail_exponent;
  double tail_amplitude = 1.0;
  std::uint64_t seed = 0;

  TorusFunction build(std::size_t grid_size) const;
  bool rough() const { return tail_exponent.has_value(); }
};

/// Decay rate p of |fhat(n)| ~ n^{-p} fitted over the upper half of the band;
/// infinity when the upper half is zero to rounding.
double tail_decay_rate(const TorusFunction& f);

// ---------------------------------------------------------------------------
// Experiments

struct BonaSmithOptions {
  SolveParams base;          ///< eps is replaced by 1/m for each member
  unsigned threads = 1;
  bool eps_only_fit = true;  ///< extra runs with identical data to fit the eps-only residual
};

struct BonaSmithFamily {
  TorusFunction base_data;
  SobolevIndex k;
  std::vector<int> m_values;
  std::map<int, Trajectory> trajectories;
};

struct BonaSmithResult {
  BonaSmithFamily family;
  ExperimentReport report;
};

/// Members u_m solve the problem regularized with eps = 1/m from J_{1/m,k} phi.
BonaSmithResult bona_smith_run(const Equation& eq, const TorusFunction& phi, SobolevIndex k,
                               std::vector<int> m_values, double t_end, const BonaSmithOptions& options = {});

/// Bound max_t E_k(u(t)) <= 2 (1 + E_k(phi)), a Gronwall rate for log(1 + E),
/// and the minimum of Q along the run.  Uses the energies recorded by the
/// solver.  Throws DegenerateDispersion at the first record without one.
ExperimentReport energy_monitor(const Equation& eq, const Trajectory& traj, SobolevIndex k);

/// Relative change tolerated between consecutive resolutions.
inline constexpr double kSmoothingTolerance = 0.10;

/// Higher norms |u(t)|_{H^{k+o}} along a ladder of runs from the same data at
/// increasing resolution (ladder[i] at grid grids[i]).
ExperimentReport smoothing_profile(const Equation& eq, const std::vector<Trajectory>& ladder, SobolevIndex k,
                                   const std::vector<double>& offsets);

struct BackwardProbeResult {
  ExperimentReport report;
  std::vector<Trajectory> backward;
  std::vector<Trajectory> forward;  ///< contrast runs, same data and resolutions
};

/// For each resolution the time-reversed equation is solved forward from the
/// data until |u|_{H^{k0}} doubles.  The forward equation is run over the same
/// horizon as a contrast.
BackwardProbeResult backward_probe(const Equation& eq, const DataSpec& data, SobolevIndex k,
                                   const std::vector<std::size_t>& resolutions, const SolveParams& params,
                                   bool run_forward = true);

struct ContinuityGaps {
  double x = 0.0;  ///< sup | |a3(f,t2)| - |a3(g,t1)| |
  double y = 0.0;  ///< sup | |a3| [P/|a3|]_ave (f,t2) - (g,t1) |
  double z = 0.0;  ///< | [P/a3]_ave (f,t2) - [P/a3]_ave (g,t1) |
};

/// Throws DegenerateDispersion when Y or Z are undefined.
ContinuityGaps continuity_gaps(const Equation& eq, const TorusFunction& f, const TorusFunction& g, double t1,
                               double t2);

}  // namespace torus3
