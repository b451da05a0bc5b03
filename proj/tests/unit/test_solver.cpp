#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "torus3/errors.hpp"
#include "torus3/fit.hpp"
#include "torus3/solver.hpp"

using namespace torus3;

namespace {

SolveParams params(double eps, double dt, double t_end, Scheme scheme = Scheme::ETDRK4) {
  SolveParams p;
  p.eps = eps;
  p.dt = dt;
  p.t_end = t_end;
  p.scheme = scheme;
  p.record_energy = false;
  return p;
}

TorusFunction smooth_data(std::size_t n) { return oracle::trig(n, {{0, 0.2}, {1, 0.6}, {2, 0.0, 0.3}}); }

}  // namespace

TEST(Params, ValidationNamesField) {
  auto expect_field = [](SolveParams p, const char* field) {
    try {
      p.validate();
      ADD_FAILURE() << field;
    } catch (const ConfigError& e) {
      EXPECT_EQ(e.field(), field);
    }
  };
  SolveParams p;
  p.dt = -1;
  expect_field(p, "solve.dt");
  p = {};
  p.dt = 1.0;
  expect_field(p, "solve.dt");
  p = {};
  p.blowup_threshold = 1.0;
  expect_field(p, "solve.blowup_threshold");
  p = {};
  p.scheme = Scheme::PicardDuhamel;
  expect_field(p, "solve.eps");
  p = {};
  p.eps = std::nan("");
  expect_field(p, "solve.eps");
  EXPECT_NO_THROW(SolveParams{}.validate());
}

TEST(Params, SchemeNames) {
  for (Scheme s : {Scheme::ExpEuler, Scheme::ETDRK4, Scheme::PicardDuhamel}) EXPECT_EQ(parse_scheme(scheme_name(s)), s);
  EXPECT_THROW(parse_scheme("rk45"), Error);
}

TEST(Solve, AiryMatchesExactMultiplier) {
  // u_t = -u_xxx - eps u_xxxx: e^{inx} evolves by e^{(i n^3 - eps n^4) t}.
  const auto eq = make_equation("airy", "-w3");
  const std::size_t n = 32;
  const auto phi = oracle::random_trig(n, 10, 3);
  // The dispersion is explicit; a tighter guard keeps the RK4 phase error of
  // the top modes below the tolerance on this coarse grid.
  auto p = params(0.01, 1e-3, 0.1);
  p.cfl = 0.25;
  const auto traj = solve(eq, phi, p);
  ASSERT_EQ(traj.terminated, Termination::Completed);
  const auto& u = traj.states.back();
  double err = 0.0;
  for (int k = 0; k <= u.max_mode(); ++k) {
    const double t = traj.times.back();
    const Complex exact = std::exp(Complex(-0.01 * std::pow(k, 4) * t, std::pow(k, 3) * t)) * phi.coeff(k);
    err = std::max(err, std::abs(u.coeff(k) - exact));
  }
  EXPECT_NEAR(traj.times.back(), 0.1, 1e-12);
  EXPECT_LT(err, 1e-8);
}

TEST(Solve, ZeroDataStaysZero) {
  for (const char* name : {"kdv", "k22"}) {
    const auto traj = solve(catalog_entry(name).equation(), TorusFunction(32), params(0.01, 1e-3, 0.01));
    EXPECT_EQ(traj.terminated, Termination::Completed) << traj.message;
    EXPECT_TRUE(traj.states.back().is_zero()) << name;
  }
}

TEST(Solve, RecordsAndSnapshots) {
  auto p = params(0.01, 1e-3, 0.01);
  p.snapshot_stride = 3;
  const auto traj = solve(catalog_entry("kdv_burgers").equation(), smooth_data(32), p);
  ASSERT_EQ(traj.records.size(), 11u);
  EXPECT_EQ(traj.records.front().t, 0.0);
  EXPECT_EQ(traj.times.front(), 0.0);
  EXPECT_EQ(traj.times, (std::vector<double>{0.0, traj.records[3].t, traj.records[6].t, traj.records[9].t,
                                             traj.records[10].t}));
  for (std::size_t i = 1; i < traj.records.size(); ++i) EXPECT_NEAR(traj.records[i].t, 1e-3 * i, 1e-15);
  EXPECT_GE(traj.substeps, 10u);
  EXPECT_DOUBLE_EQ(traj.horizon(), traj.records.back().t);
}

TEST(Solve, Deterministic) {
  const auto p = params(0.01, 1e-3, 0.01);
  const auto a = solve(catalog_entry("k22").equation(), oracle::trig(32, {{0, 2.0}, {1, 0.5}}), p);
  const auto b = solve(catalog_entry("k22").equation(), oracle::trig(32, {{0, 2.0}, {1, 0.5}}), p);
  EXPECT_EQ(fingerprint(a.states.back()), fingerprint(b.states.back()));
}

TEST(Solve, MeanInvariantForConservativeEquations) {
  for (const auto& entry : catalog()) {
    if (!entry.total_derivative) continue;
    const auto phi = entry.probe_sign == ProbeSign::Positive ? oracle::trig(32, {{0, 2.0}, {1, 0.4}, {2, 0.0, 0.2}})
                                                           : smooth_data(32);
    // The H^10 cascade of K(2,2) trips the default blowup threshold; only the mean matters here.
    auto p = params(0.01, 1e-3, 0.02);
    p.blowup_threshold = 1e12;
    const auto traj = solve(entry.equation(), phi, p);
    ASSERT_EQ(traj.terminated, Termination::Completed) << entry.name << ": " << traj.message;
    for (const auto& r : traj.records) EXPECT_NEAR(r.mean, average(phi), 1e-11) << entry.name;
  }
}

TEST(Solve, KdvL2NonIncreasingWithViscosity) {
  const auto traj = solve(catalog_entry("kdv").equation(), smooth_data(64), params(0.01, 1e-3, 0.05));
  ASSERT_EQ(traj.terminated, Termination::Completed);
  for (std::size_t i = 1; i < traj.records.size(); ++i) EXPECT_LE(traj.records[i].l2, traj.records[i - 1].l2 + 1e-10);
  EXPECT_LT(traj.records.back().l2, traj.records.front().l2);
}

TEST(Solve, KdvInviscidL2Drift) {
  const auto traj = solve(catalog_entry("kdv").equation(), smooth_data(256), params(0.0, 1e-4, 0.1));
  ASSERT_EQ(traj.terminated, Termination::Completed);
  const double l0 = traj.records.front().l2;
  for (const auto& r : traj.records) EXPECT_LT(std::abs(r.l2 * r.l2 - l0 * l0), 1e-7);
}

TEST(Solve, StopCallbackEndsRun) {
  const auto traj = solve(catalog_entry("kdv_burgers").equation(), smooth_data(32), params(0.01, 1e-3, 0.05),
                          [](const NormRecord& r, const TorusFunction&) { return r.t >= 0.0095; });
  EXPECT_EQ(traj.terminated, Termination::Stopped);
  EXPECT_NEAR(traj.horizon(), 0.01, 1e-12);
  EXPECT_EQ(traj.times.back(), traj.horizon());
}

TEST(Solve, DomainErrorEndsRun) {
  const auto eq = make_equation("logistic", "-w3 + 0.1*log(w0)");
  const auto traj = solve(eq, oracle::trig(32, {{0, 0.5}, {1, 1.0}}), params(0.01, 1e-3, 0.01));
  EXPECT_EQ(traj.terminated, Termination::DomainError);
  EXPECT_FALSE(traj.message.empty());
}

TEST(Blowup, Detection) {
  SolveParams p;
  const auto phi = smooth_data(64);
  EXPECT_FALSE(detect_blowup(phi, phi, p));
  EXPECT_TRUE(detect_blowup(phi * 1e4, phi, p));
  auto q = params(0.01, 1e-3, 0.1);
  const auto traj = solve(catalog_entry("kdv_burgers").equation(), phi, q);
  EXPECT_EQ(traj.terminated, Termination::Completed);
  EXPECT_FALSE(detect_blowup(traj, q));
}

TEST(Blowup, LowThresholdTerminates) {
  // Backward heat-like growth: a tiny threshold is crossed quickly.
  auto p = params(1e-6, 1e-4, 0.05);
  p.blowup_threshold = 1.01;
  const auto eq = catalog_entry("kdv_burgers").equation().time_reversed();
  const auto traj = solve(eq, oracle::trig(32, {{3, 0.1}}), p);
  EXPECT_EQ(traj.terminated, Termination::Blowup);
  EXPECT_LT(traj.horizon(), 0.05);
}

TEST(Convergence, SelfConvergenceOrders) {
  const auto eq = catalog_entry("kdv_burgers").equation();
  const auto phi = smooth_data(16);
  auto err_at = [&](Scheme s, double dt) {
    const auto ref = solve(eq, phi, params(1e-3, dt / 8, 0.1, s)).states.back();
    return sobolev_norm(solve(eq, phi, params(1e-3, dt, 0.1, s)).states.back() - ref, {0.0});
  };
  auto order = [&](Scheme s, std::vector<double> dts) {
    std::vector<double> errs;
    for (double dt : dts) errs.push_back(err_at(s, dt));
    return fit_log_slope(dts, errs);
  };
  EXPECT_GE(order(Scheme::ETDRK4, {5e-4, 2.5e-4, 1.25e-4}), 3.5);
  EXPECT_GE(order(Scheme::ExpEuler, {5e-4, 2.5e-4, 1.25e-4}), 0.9);
}

TEST(Convergence, PicardAgreesWithEtdrk4) {
  const auto eq = catalog_entry("kdv_burgers").equation();
  const auto phi = smooth_data(32);
  // Both schemes resolve the explicit dispersion only with a tighter guard.
  auto p = params(0.01, 1e-3, 0.02, Scheme::ETDRK4);
  p.cfl = 0.1;
  const auto a = solve(eq, phi, p);
  p.scheme = Scheme::PicardDuhamel;
  const auto b = solve(eq, phi, p);
  ASSERT_EQ(b.terminated, Termination::Completed) << b.message;
  EXPECT_LT(sobolev_norm(a.states.back() - b.states.back(), {10.0}), 1e-6);
}

TEST(StepLimit, DispersiveGuard) {
  const auto eq = catalog_entry("k22").equation();
  const auto u = oracle::trig(32, {{0, 2.0}, {1, 1.0}});
  EXPECT_NEAR(step_limit(eq, u, 0.0, 0.5), 0.5 / (6.0 * 15 * 15 * 15), 1e-12);
  EXPECT_TRUE(std::isinf(step_limit(eq, u, 0.0, 0.0)));
}

TEST(Leibniz, KdvLeadingCoefficient) {
  const auto r = leibniz_symbol_check(catalog_entry("kdv").equation(), smooth_data(32), 0.0);
  EXPECT_LT(r.coeff_err, 1e-8);
  EXPECT_LT(r.next_coeff_err, 1e-8);
  EXPECT_EQ(r.frequencies, (std::vector<int>{8, 16, 32, 64}));
  EXPECT_EQ(r.residual_norms.size(), 4u);
}

TEST(Leibniz, VariableCoefficientNextOrder) {
  const auto r = leibniz_symbol_check(catalog_entry("var_kdv").equation(), smooth_data(32), 0.0);
  EXPECT_LT(r.coeff_err, 1e-6);
  EXPECT_LT(r.next_coeff_err, 1e-6);
}

TEST(Leibniz, K22OrderAtMostSeven) {
  const auto r = leibniz_symbol_check(catalog_entry("k22").equation(), oracle::trig(32, {{0, 2.0}, {1, 1.0}}), 0.0);
  EXPECT_LE(r.fitted_order, 7.3);
  EXPECT_LT(r.coeff_err, 1e-6);
  EXPECT_LT(r.next_coeff_err, 1e-6);
}

TEST(Leibniz, DegenerateThrows) {
  EXPECT_THROW(leibniz_symbol_check(catalog_entry("k22").equation(), oracle::trig(32, {{1, 1.0}}), 0.0),
               DegenerateDispersion);
}
