#include "torus3/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "torus3/errors.hpp"
#include "torus3/fit.hpp"
#include "torus3/gauge.hpp"

namespace torus3 {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string hex(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << v;
  return os.str();
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// Runs fn(i) for i in [0, n) on up to `threads` workers; the first exception is rethrown.
template <class Fn>
void run_parallel(std::size_t n, unsigned threads, Fn fn) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] < v[i - 1])) return false;
  }
  return true;
}

double sign_of(const TorusFunction& a3) { return a3.value_at(0.0) > 0.0 ? 1.0 : -1.0; }

}  // namespace

// ---------------------------------------------------------------------------
// Tables and reports

void Table::add_row(std::vector<double> row) {
  if (row.size() != columns.size()) throw Error("table '" + name + "': row width mismatch");
  rows.push_back(std::move(row));
}

std::vector<double> Table::column(std::string_view col) const {
  const auto it = std::find(columns.begin(), columns.end(), col);
  if (it == columns.end()) throw Error("table '" + name + "' has no column '" + std::string(col) + "'");
  const auto idx = static_cast<std::size_t>(it - columns.begin());
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[idx]);
  return out;
}

std::string_view outcome_name(Outcome o) {
  switch (o) {
    case Outcome::Pass: return "pass";
    case Outcome::Fail: return "fail";
    case Outcome::Inconclusive: return "inconclusive";
    case Outcome::IllPosedSignal: return "ill_posed_signal";
    case Outcome::DispersiveControl: return "dispersive_control";
  }
  return "?";
}

const Table& ExperimentReport::table(std::string_view name) const {
  for (const auto& t : tables) {
    if (t.name == name) return t;
  }
  throw Error("report has no table '" + std::string(name) + "'");
}

Table& ExperimentReport::add_table(std::string name, std::vector<std::string> columns) {
  tables.push_back(Table{std::move(name), std::move(columns), {}});
  return tables.back();
}

void ExperimentReport::add_verdict(std::string criterion, Outcome outcome, std::string table, std::string detail) {
  verdicts.push_back(Verdict{std::move(criterion), outcome, std::move(table), std::move(detail)});
}

bool ExperimentReport::failed() const {
  return std::any_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.outcome == Outcome::Fail; });
}

// ---------------------------------------------------------------------------
// Data

TorusFunction DataSpec::build(std::size_t grid_size) const {
  std::vector<Complex> c(grid_size / 2 + 1, 0.0);
  const int top = static_cast<int>(grid_size / 2) - 1;
  c[0] = mean;
  for (const auto& term : terms) {
    if (term.mode < 1) throw Error("trig term mode must be >= 1");
    if (term.mode > top) continue;
    c[static_cast<std::size_t>(term.mode)] += Complex(term.cos_coeff, -term.sin_coeff) / 2.0;
  }
  if (tail_exponent) {
    std::mt19937_64 rng(seed);
    for (int n = 1; n <= top; ++n) {
      const double phase = kTwoPi * static_cast<double>(rng() >> 11) * 0x1.0p-53;
      const double modulus = tail_amplitude * std::pow(1.0 + static_cast<double>(n) * n, -*tail_exponent / 2.0);
      c[static_cast<std::size_t>(n)] += std::polar(modulus, phase);
    }
  }
  return TorusFunction(grid_size, std::move(c));
}

double tail_decay_rate(const TorusFunction& f) {
  const int top = f.max_mode();
  double peak = 0.0;
  for (int n = 1; n <= top; ++n) peak = std::max(peak, std::abs(f.coeff(n)));
  std::vector<double> ns, cs;
  for (int n = std::max(1, top / 2); n <= top; ++n) {
    const double a = std::abs(f.coeff(n));
    if (a > 1e-13 * peak) {
      ns.push_back(n);
      cs.push_back(a);
    }
  }
  if (ns.size() < 2 || ns.size() < static_cast<std::size_t>(top / 4)) return std::numeric_limits<double>::infinity();
  return -fit_log_slope(ns, cs);
}

// ---------------------------------------------------------------------------
// Mollified families

BonaSmithResult bona_smith_run(const Equation& eq, const TorusFunction& phi, SobolevIndex k,
                               std::vector<int> m_values, double t_end, const BonaSmithOptions& options) {
  std::sort(m_values.begin(), m_values.end());
  if (m_values.empty() || m_values.front() < 1) throw Error("bona_smith_run: m values must be positive");

  BonaSmithResult result;
  auto& fam = result.family;
  auto& rep = result.report;
  fam.base_data = phi;
  fam.k = k;
  fam.m_values = m_values;
  rep.kind = "bona_smith";
  rep.provenance["equation"] = eq.name();
  rep.provenance["equation_fingerprint"] = hex(eq.fingerprint());
  rep.provenance["data_fingerprint"] = hex(fingerprint(phi));

  const double decay = tail_decay_rate(phi);
  rep.fitted_rates["data_tail_decay"] = decay;
  if (decay < k.value() + 0.5 - kDefaultEta) {
    rep.notes.push_back("data coefficients decay like n^-" + fmt(decay) + ", too slow for H^" + fmt(k.value()));
  }
  const DiagnosticsRecord d0 = diagnostics(eq, phi, 0.0, k);
  if (d0.delta > kDeltaTolerance && std::abs(d0.breve_delta) > kResonanceTolerance && !(d0.q_min > 0.0)) {
    rep.notes.push_back("data are not in the forward admissible set (min Q = " + fmt(d0.q_min) + ")");
  }

  SolveParams base = options.base;
  base.t_end = t_end;
  base.k = k;
  base.snapshot_stride = 1;
  base.record_energy = true;

  // Members, then (optionally) identical-data runs for the eps-only residual.
  struct Job {
    int m;
    bool eps_only;
  };
  std::vector<Job> jobs;
  for (int m : m_values) jobs.push_back({m, false});
  const bool eps_fit = options.eps_only_fit && m_values.size() >= 3;
  if (eps_fit) {
    for (int m : m_values) jobs.push_back({m, true});
  }
  const TorusFunction shared = mollify(phi, 1.0 / m_values.back(), k.value());
  std::vector<Trajectory> runs(jobs.size());
  run_parallel(jobs.size(), options.threads, [&](std::size_t i) {
    SolveParams p = base;
    p.eps = 1.0 / jobs[i].m;
    p.record_energy = !jobs[i].eps_only;
    const TorusFunction data = jobs[i].eps_only ? shared : mollify(phi, 1.0 / jobs[i].m, k.value());
    runs[i] = solve(eq, data, p);
  });
  for (std::size_t i = 0; i < m_values.size(); ++i) fam.trajectories.emplace(m_values[i], runs[i]);

  // The bound is taken against the unmollified data; the per-member bound
  // 2 (1 + E_k(u_m(0))) is kept as a column for comparison.
  const double base_energy = energy(eq, phi, 0.0, k);
  const double base_bound = 2.0 * (1.0 + base_energy);
  rep.fitted_rates["energy_base_data"] = base_energy;
  auto& members = rep.add_table("members", {"m", "eps", "horizon", "termination", "h_k_final", "energy_initial",
                                            "energy_max", "energy_bound", "member_bound", "q_min"});
  bool bound_ok = true, member_bound_ok = true, q_ok = true, all_completed = true;
  for (int m : m_values) {
    const Trajectory& tr = fam.trajectories.at(m);
    double emax = 0.0, qmin = std::numeric_limits<double>::infinity();
    for (const auto& r : tr.records) {
      emax = std::max(emax, r.energy);
      qmin = std::min(qmin, r.q_min);
    }
    const double e0 = tr.records.front().energy;
    const double member_bound = 2.0 * (1.0 + e0);
    bound_ok = bound_ok && emax <= base_bound;
    member_bound_ok = member_bound_ok && emax <= member_bound;
    q_ok = q_ok && qmin > kDeltaTolerance;
    all_completed = all_completed && tr.terminated == Termination::Completed;
    if (tr.terminated != Termination::Completed) {
      rep.notes.push_back("member m=" + std::to_string(m) + " ended " + std::string(termination_name(tr.terminated)) +
                          ": " + tr.message);
    }
    members.add_row({double(m), 1.0 / m, tr.horizon(), double(static_cast<int>(tr.terminated)),
                     tr.records.back().h_k, e0, emax, base_bound, member_bound, qmin});
  }
  rep.add_verdict("energy_bound_all_members", bound_ok ? Outcome::Pass : Outcome::Fail, "members",
                  "max_t E_k(u_m(t)) <= 2 (1 + E_k(phi)) = " + fmt(base_bound));
  rep.add_verdict("energy_bound_member_data", member_bound_ok ? Outcome::Pass : Outcome::Fail, "members",
                  "max_t E_k(u_m(t)) <= 2 (1 + E_k(u_m(0)))");
  rep.add_verdict("q_positivity_all_members", q_ok ? Outcome::Pass : Outcome::Fail, "members", "min_t min_x Q > 0");

  auto& diffs = rep.add_table("differences", {"m", "m_next", "sup_diff_hk", "sup_energy_diff", "data_diff_hk"});
  for (std::size_t i = 0; i + 1 < m_values.size(); ++i) {
    const Trajectory& a = fam.trajectories.at(m_values[i]);
    const Trajectory& b = fam.trajectories.at(m_values[i + 1]);
    const std::size_t common = std::min(a.states.size(), b.states.size());
    double sup_h = 0.0, sup_e = 0.0;
    for (std::size_t s = 0; s < common; ++s) {
      sup_h = std::max(sup_h, sobolev_norm(b.states[s] - a.states[s], k));
      try {
        sup_e = std::max(sup_e, energy_diff(eq, b.states[s], a.states[s], a.times[s], k));
      } catch (const Error&) {
        sup_e = kNaN;
      }
    }
    diffs.add_row({double(m_values[i]), double(m_values[i + 1]), sup_h, sup_e,
                   sobolev_norm(b.states.front() - a.states.front(), k)});
  }

  if (diffs.rows.empty()) {
    rep.add_verdict("cauchy_hk_decreasing", Outcome::Inconclusive, "differences", "fewer than two members");
    rep.add_verdict("cauchy_energy_decreasing", Outcome::Inconclusive, "differences", "fewer than two members");
    rep.add_verdict("cauchy_halving", Outcome::Inconclusive, "differences", "fewer than two members");
  } else {
    const auto h = diffs.column("sup_diff_hk");
    const auto e = diffs.column("sup_energy_diff");
    auto describe = [](const std::vector<double>& v) {
      std::string s;
      for (double x : v) s += (s.empty() ? "" : ", ") + fmt(x);
      return s;
    };
    const bool single = h.size() < 2;
    rep.add_verdict("cauchy_hk_decreasing",
                    single ? Outcome::Inconclusive : (strictly_decreasing(h) ? Outcome::Pass : Outcome::Fail),
                    "differences", "sup_t |u_next - u_m|_{H^k}: " + describe(h));
    rep.add_verdict("cauchy_energy_decreasing",
                    single ? Outcome::Inconclusive : (strictly_decreasing(e) ? Outcome::Pass : Outcome::Fail),
                    "differences", "sup_t E_k(u_next, u_m): " + describe(e));
    rep.add_verdict("cauchy_halving",
                    single ? Outcome::Inconclusive : (h.back() < 0.5 * h.front() ? Outcome::Pass : Outcome::Fail),
                    "differences", "last / first = " + fmt(h.back() / h.front()));
    if (h.size() >= 2 && std::all_of(h.begin(), h.end(), [](double x) { return x > 0.0; })) {
      std::vector<double> ms(m_values.begin(), m_values.end() - 1);
      rep.fitted_rates["hk_difference_vs_m"] = fit_log_slope(ms, h);
    }
    if (!all_completed) rep.notes.push_back("differences use the common horizon of the members");
  }

  if (eps_fit) {
    auto& eo = rep.add_table("eps_only", {"eps", "eps_next", "sup_diff_hk"});
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i + 1 < m_values.size(); ++i) {
      const Trajectory& a = runs[m_values.size() + i];
      const Trajectory& b = runs[m_values.size() + i + 1];
      const std::size_t common = std::min(a.states.size(), b.states.size());
      double sup_h = 0.0;
      for (std::size_t s = 0; s < common; ++s) sup_h = std::max(sup_h, sobolev_norm(b.states[s] - a.states[s], k));
      eo.add_row({1.0 / m_values[i], 1.0 / m_values[i + 1], sup_h});
      if (sup_h > 0.0) {
        xs.push_back(1.0 / m_values[i]);
        ys.push_back(sup_h);
      }
    }
    if (xs.size() >= 2) rep.fitted_rates["eps_only_exponent"] = fit_log_slope(xs, ys);
  }
  rep.plots.push_back({"differences", "m", {"sup_diff_hk", "data_diff_hk"}, true, true, "difference vs m"});
  rep.plots.push_back({"members", "m", {"energy_max", "energy_bound", "member_bound"}, true, true, "energy vs bound"});
  return result;
}

// ---------------------------------------------------------------------------
// Energy monitor

ExperimentReport energy_monitor(const Equation& eq, const Trajectory& traj, SobolevIndex k) {
  ExperimentReport rep;
  rep.kind = "energy_monitor";
  rep.provenance["equation"] = eq.name();
  rep.provenance["equation_fingerprint"] = hex(eq.fingerprint());
  if (traj.records.empty()) throw Error("energy_monitor: empty trajectory");
  for (const auto& r : traj.records) {
    if (!std::isfinite(r.energy)) throw DegenerateDispersion(r.delta, kDeltaTolerance, "energy at t=" + fmt(r.t));
  }
  rep.provenance["k"] = fmt(k.value());

  auto& tab = rep.add_table("energy", {"t", "energy", "bound", "q_min", "delta", "delta_prime"});
  const double e0 = traj.records.front().energy;
  const double bound = 2.0 * (1.0 + e0);
  double emax = 0.0, qmin = std::numeric_limits<double>::infinity();
  std::vector<double> ts, logs;
  for (const auto& r : traj.records) {
    tab.add_row({r.t, r.energy, bound, r.q_min, r.delta, r.delta_prime});
    emax = std::max(emax, r.energy);
    qmin = std::min(qmin, r.q_min);
    ts.push_back(r.t);
    logs.push_back(std::log1p(r.energy));
  }
  rep.fitted_rates["energy_factor"] = emax / (1.0 + e0);
  rep.fitted_rates["q_min"] = qmin;
  if (ts.size() >= 2) rep.fitted_rates["gronwall_rate"] = fit_line(ts, logs).slope;
  rep.add_verdict("energy_bound", emax <= bound ? Outcome::Pass : Outcome::Fail, "energy",
                  "max E / (1 + E(0)) = " + fmt(emax / (1.0 + e0)) + " against 2");
  if (qmin > kDeltaTolerance) {
    rep.add_verdict("q_positivity", Outcome::Pass, "energy", "min Q = " + fmt(qmin));
  } else if (std::abs(qmin) <= kDeltaTolerance) {
    rep.add_verdict("q_positivity", Outcome::Inconclusive, "energy", "Q vanishes along the run");
  } else {
    rep.add_verdict("q_positivity", Outcome::Fail, "energy", "min Q = " + fmt(qmin));
  }
  rep.plots.push_back({"energy", "t", {"energy", "bound"}, false, true, "gauged energy"});
  return rep;
}

// ---------------------------------------------------------------------------
// Smoothing

ExperimentReport smoothing_profile(const Equation& eq, const std::vector<Trajectory>& ladder, SobolevIndex k,
                                   const std::vector<double>& offsets) {
  ExperimentReport rep;
  rep.kind = "smoothing_profile";
  rep.provenance["equation"] = eq.name();
  if (ladder.empty() || offsets.empty()) throw Error("smoothing_profile: empty ladder or offsets");

  std::vector<std::string> cols = {"N", "t"};
  for (double o : offsets) cols.push_back("h_k+" + fmt(o));
  auto& prof = rep.add_table("profile", cols);
  for (const auto& tr : ladder) {
    for (std::size_t s = 0; s < tr.states.size(); ++s) {
      std::vector<double> row = {double(tr.states[s].grid_size()), tr.times[s]};
      for (double o : offsets) row.push_back(sobolev_norm(tr.states[s], SobolevIndex(k.value() + o)));
      prof.add_row(std::move(row));
    }
  }

  const DiagnosticsRecord d = diagnostics(eq, ladder.front().states.front(), 0.0, k);
  const bool parabolic = d.delta > kDeltaTolerance && d.q_min > kDeltaTolerance;

  auto& res = rep.add_table("resolution", {"offset", "N_coarse", "N_fine", "t_final", "initial_ratio", "final_ratio"});
  for (double o : offsets) {
    const SobolevIndex idx(k.value() + o);
    bool all_within = true, last_within = false, grows = true, complete = true;
    for (std::size_t i = 0; i + 1 < ladder.size(); ++i) {
      const Trajectory& a = ladder[i];
      const Trajectory& b = ladder[i + 1];
      complete = complete && a.terminated == Termination::Completed && b.terminated == Termination::Completed;
      const double t_final = std::min(a.times.back(), b.times.back());
      const double initial = sobolev_norm(b.states.front(), idx) / sobolev_norm(a.states.front(), idx);
      const double fin = sobolev_norm(b.states.back(), idx) / sobolev_norm(a.states.back(), idx);
      res.add_row({o, double(a.states.front().grid_size()), double(b.states.front().grid_size()), t_final, initial, fin});
      const bool within = std::abs(fin - 1.0) < kSmoothingTolerance;
      all_within = all_within && within;
      last_within = within;
      grows = grows && initial > 1.0 + kSmoothingTolerance;
    }
    const std::string name = "smoothing_offset_" + fmt(o);
    if (ladder.size() < 2) {
      rep.add_verdict(name, Outcome::Inconclusive, "resolution", "needs at least two resolutions");
      continue;
    }
    if (!parabolic) {
      rep.add_verdict(name, Outcome::DispersiveControl, "resolution", "no forward smoothing expected (Q not positive)");
      continue;
    }
    std::string detail = grows ? "initial norm grows with N" : "initial norm does not grow with N";
    if (!complete) {
      rep.add_verdict(name, Outcome::Fail, "resolution", "a run did not complete");
    } else if (all_within) {
      rep.add_verdict(name, Outcome::Pass, "resolution", "final norms agree within 10%; " + detail);
    } else if (last_within) {
      rep.add_verdict(name, Outcome::Inconclusive, "resolution", "only the finest pair agrees within 10%; " + detail);
    } else {
      rep.add_verdict(name, Outcome::Fail, "resolution", "final norms differ by more than 10%; " + detail);
    }
  }
  rep.notes.push_back("stabilization under resolution doubling within 10% is used as the smoothing criterion");
  rep.plots.push_back({"profile", "t", {cols.back()}, false, true, "higher norm vs t"});
  return rep;
}

// ---------------------------------------------------------------------------
// Backward growth

BackwardProbeResult backward_probe(const Equation& eq, const DataSpec& data, SobolevIndex k,
                                   const std::vector<std::size_t>& resolutions, const SolveParams& params,
                                   bool run_forward) {
  BackwardProbeResult out;
  auto& rep = out.report;
  rep.kind = "backward_probe";
  rep.provenance["equation"] = eq.name();
  rep.provenance["equation_fingerprint"] = hex(eq.fingerprint());
  const Equation reversed = eq.time_reversed();

  auto& dbl = rep.add_table("doubling", {"N", "doubling_time", "termination", "initial_hk0"});
  std::vector<double> ns, times;
  bool all_found = true;
  for (std::size_t n : resolutions) {
    const TorusFunction phi = data.build(n);
    if (n == resolutions.front()) {
      const auto member = membership(eq, phi, 0.0, k);
      if (!member.count(DataSet::PkPlus)) rep.notes.push_back("data are not in the forward admissible set");
    }
    const double h0 = sobolev_norm(phi, params.k0);
    SolveParams p = params;
    p.record_energy = false;
    double prev_t = 0.0, prev_h = h0, found = kNaN;
    auto stop = [&](const NormRecord& r, const TorusFunction&) {
      if (r.h_k0 >= 2.0 * h0) {
        // Log-linear interpolation between the last two records.
        const double w = (std::log(2.0 * h0) - std::log(prev_h)) / (std::log(r.h_k0) - std::log(prev_h));
        found = prev_t + w * (r.t - prev_t);
        return true;
      }
      prev_t = r.t;
      prev_h = r.h_k0;
      return false;
    };
    Trajectory tr = solve(reversed, phi, p, stop);
    if (std::isnan(found) && tr.terminated != Termination::Completed) found = tr.horizon();
    dbl.add_row({double(n), found, double(static_cast<int>(tr.terminated)), h0});
    all_found = all_found && std::isfinite(found);
    ns.push_back(double(n));
    times.push_back(found);
    out.backward.push_back(std::move(tr));
  }

  if (!data.rough()) {
    rep.add_verdict("backward_doubling", Outcome::Inconclusive, "doubling",
                    "smooth data lie outside the non-smooth hypothesis");
  } else if (resolutions.size() < 2 || !all_found) {
    rep.add_verdict("backward_doubling", Outcome::Inconclusive, "doubling",
                    all_found ? "needs at least two resolutions" : "no doubling within the horizon at some N");
  } else {
    const double slope = fit_log_slope(ns, times);
    rep.fitted_rates["doubling_time_slope"] = slope;
    const bool signal = strictly_decreasing(times) && slope < 0.0;
    rep.add_verdict("backward_doubling", signal ? Outcome::IllPosedSignal : Outcome::Inconclusive, "doubling",
                    "log-log slope of doubling time vs N = " + fmt(slope));
  }

  if (run_forward) {
    auto& fwd = rep.add_table("forward", {"N", "max_growth", "doubled", "termination", "final_hk0"});
    bool doubled_any = false;
    for (std::size_t n : resolutions) {
      const TorusFunction phi = data.build(n);
      Trajectory tr = solve(eq, phi, params);
      const double h0 = tr.records.front().h_k0;
      double growth = 0.0;
      for (const auto& r : tr.records) growth = std::max(growth, r.h_k0 / h0);
      const bool doubled = growth >= 2.0;
      doubled_any = doubled_any || doubled || tr.terminated != Termination::Completed;
      fwd.add_row({double(n), growth, doubled ? 1.0 : 0.0, double(static_cast<int>(tr.terminated)),
                   tr.records.back().h_k0});
      out.forward.push_back(std::move(tr));
    }
    rep.add_verdict("forward_contrast", doubled_any ? Outcome::Fail : Outcome::Pass, "forward",
                    doubled_any ? "a forward run doubled or stopped" : "no forward doubling within the horizon");
  }
  rep.plots.push_back({"doubling", "N", {"doubling_time"}, true, true, "backward doubling time vs N"});
  return out;
}

// ---------------------------------------------------------------------------
// Continuity gaps

ContinuityGaps continuity_gaps(const Equation& eq, const TorusFunction& f, const TorusFunction& g, double t1,
                               double t2) {
  if (f.grid_size() != g.grid_size()) throw Error("continuity_gaps: grid size mismatch");
  const TorusFunction af = dispersion_coefficient(eq, f, t2);
  const TorusFunction ag = dispersion_coefficient(eq, g, t1);
  const std::size_t m = kExtremaOversampling * f.grid_size();
  const auto vf = af.sample(m);
  const auto vg = ag.sample(m);
  ContinuityGaps gaps;
  for (std::size_t j = 0; j < m; ++j) gaps.x = std::max(gaps.x, std::abs(std::abs(vf[j]) - std::abs(vg[j])));

  const double rf = resonance_average(eq, f, t2);
  const double rg = resonance_average(eq, g, t1);
  // [P/|a3|]_ave = sign(a3) [P/a3]_ave when a3 keeps one sign.
  const double bf = sign_of(af) * rf;
  const double bg = sign_of(ag) * rg;
  for (std::size_t j = 0; j < m; ++j) gaps.y = std::max(gaps.y, std::abs(std::abs(vf[j]) * bf - std::abs(vg[j]) * bg));
  gaps.z = std::abs(rf - rg);
  return gaps;
}

}  // namespace torus3
