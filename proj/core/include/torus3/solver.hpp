#pragma once

// Time integration of the regularized problem  u_t + eps u_xxxx = F(u, t)
// through its Duhamel form, with blow-up detection.

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "torus3/equation.hpp"
#include "torus3/spectral.hpp"

namespace torus3 {

enum class Scheme { ExpEuler, ETDRK4, PicardDuhamel };
std::string_view scheme_name(Scheme s);
/// Throws Error for unknown names.
Scheme parse_scheme(std::string_view name);

enum class Termination { Completed, Blowup, DomainError, StepUnstable, Stopped };
std::string_view termination_name(Termination t);

struct PicardOptions {
  int half_nodes = 2;        ///< each window carries 2 * half_nodes + 1 nodes
  double tolerance = 1e-13;  ///< relative sup change of the iterate
  int max_iterations = 200;
};

struct SolveParams {
  double eps = 0.0;
  double dt = 1e-3;
  double t_end = 0.05;
  Scheme scheme = Scheme::ETDRK4;
  int snapshot_stride = 10;
  double blowup_threshold = 1e3;
  SobolevIndex k0{10.0};
  SobolevIndex k{10.0};
  /// Substeps keep h <= cfl / (max|dF/dw3| * N_max^3).  Zero disables the guard.
  double cfl = 0.5;
  /// Record E_k(u(t), t) for every step (NaN where the gauge degenerates).
  bool record_energy = true;
  PicardOptions picard{};

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

struct NormRecord {
  double t = 0.0;
  double h_k0 = 0.0;
  double h_k = 0.0;
  double energy = 0.0;
  double delta = 0.0;
  double delta_prime = 0.0;
  double q_min = 0.0;
  double mean = 0.0;
  double l2 = 0.0;
};

struct Trajectory {
  std::vector<double> times;           ///< snapshot times, times[0] = 0
  std::vector<TorusFunction> states;   ///< snapshot states
  std::vector<NormRecord> records;     ///< one per accepted step, records[0] at t = 0
  Termination terminated = Termination::Completed;
  std::string message;
  std::size_t substeps = 0;

  double horizon() const { return records.empty() ? 0.0 : records.back().t; }
};

/// Called after every accepted step; returning true stops the run.
using StopCallback = std::function<bool(const NormRecord&, const TorusFunction&)>;

/// Integrates from t = 0.  Errors during the run end it with the matching
/// Termination instead of throwing; invalid parameters throw ConfigError.
Trajectory solve(const Equation& eq, const TorusFunction& phi, const SolveParams& params,
                 const StopCallback& stop = {});

/// |u|_{H^{k0}} > threshold (1 + |phi|_{H^{k0}}).
bool detect_blowup(const TorusFunction& u, const TorusFunction& phi, const SolveParams& params);
bool detect_blowup(const Trajectory& traj, const SolveParams& params);

/// Norms and diagnostics of one state.
NormRecord make_record(const Equation& eq, const TorusFunction& u, double t, const SolveParams& params);

/// Largest step allowed by the dispersive guard at state u (infinity when disabled).
double step_limit(const Equation& eq, const TorusFunction& u, double t, double cfl);

struct LeibnizCheck {
  double fitted_order = 0.0;      ///< effective derivative order of the residual
  double coeff_err = 0.0;         ///< recovered d^9 coefficient vs dF/dw3, relative sup
  double next_coeff_err = 0.0;    ///< recovered d^8 coefficient vs P, relative sup
  std::vector<int> frequencies;
  std::vector<double> residual_norms;
};

/// Checks d^6 F(u + du) = a3 d^9 du + P d^8 du + O(d^7 du) for the first
/// variation du = amp N^{-9} cos(Nx), N in `frequencies`.  The slope of
/// log|r(N)| against log N is shifted by 9 to give a derivative order.  The
/// coefficients of d^9 and d^8 are recovered from the polynomial dependence of
/// e^{-iKx} d^6 [dF(u) e^{iKx}] on K = 0..9 on the grid of u.
LeibnizCheck leibniz_symbol_check(const Equation& eq, const TorusFunction& u, double t,
                                  std::vector<int> frequencies = {8, 16, 32, 64}, double amp = 1.0);

}  // namespace torus3
