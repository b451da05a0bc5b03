#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "torus3/errors.hpp"
#include "torus3/gauge.hpp"

using namespace torus3;

namespace {

constexpr std::size_t N = 128;

const TorusFunction& two_plus_cos() {
  static const auto f = oracle::trig(N, {{0, 2.0}, {1, 1.0}});
  return f;
}

}  // namespace

TEST(Gauge, TrivialForKdvAndKdvBurgers) {
  const auto f = oracle::random_trig(N, 6, 1);
  for (const char* name : {"kdv", "kdv_burgers"}) {
    for (double k : {7.5, 10.0, 12.5}) {
      const auto ctx = build_gauge(catalog_entry(name).equation(), f, 0.0, {k});
      EXPECT_LT(max_coeff_diff(ctx.phi, TorusFunction::constant(N, 1.0)), 1e-14) << name << ' ' << k;
      EXPECT_LT(max_coeff_diff(ctx.phi_inv, TorusFunction::constant(N, 1.0)), 1e-14);
    }
  }
}

TEST(Gauge, K22ClosedFormAtDegenerateIndex) {
  // At k' = 7.5 the modulus power is 1 and Phi = exp(3 ln(f / f(0))) = (f / 3)^3.
  const auto ctx = build_gauge(catalog_entry("k22").equation(), two_plus_cos(), 0.0, {7.5});
  const double err = oracle::sup_on_grid(
      [&](double x) { return ctx.phi.value_at(x) - std::pow((2 + std::cos(x)) / 3, 3); });
  EXPECT_LT(err, 1e-13);
}

TEST(Gauge, K22ClosedFormGeneralIndex) {
  // |a3| = 2 f, so Phi = (2 f)^{(2k'-15)/6} (f/3)^3.
  const double k = 10.0;
  const auto ctx = build_gauge(catalog_entry("k22").equation(), two_plus_cos(), 0.0, {k});
  const double err = oracle::sup_on_grid([&](double x) {
    const double f = 2 + std::cos(x);
    return ctx.phi.value_at(x) / (std::pow(2 * f, (2 * k - 15) / 6) * std::pow(f / 3, 3)) - 1.0;
  });
  EXPECT_LT(err, 1e-12);
}

TEST(Gauge, PositiveAndInverse) {
  for (const auto& entry : catalog()) {
    const auto eq = entry.equation();
    for (const auto& f : random_probes(5, 3, 256, entry.probe_sign)) {
      const auto ctx = build_gauge(eq, f, 0.4, {10.0});
      EXPECT_GT(min_value(ctx.phi), 0.0);
      // Both weights are built pointwise, so their product is 1 at the nodes up
      // to the projection onto the band; Harry-Dym weights need the finer grid.
      const auto a = ctx.phi.grid_values(), b = ctx.phi_inv.grid_values();
      for (std::size_t j = 0; j < a.size(); ++j) EXPECT_NEAR(a[j] * b[j], 1.0, 1e-8) << entry.name;
      EXPECT_EQ(ctx.source_fingerprint != 0, true);
    }
  }
}

TEST(Gauge, DegenerateThrows) {
  EXPECT_THROW(build_gauge(catalog_entry("k22").equation(), oracle::trig(N, {{1, 1.0}}), 0.0, {10.0}),
               DegenerateDispersion);
}

TEST(Identity, TrivialCases) {
  const auto f = oracle::random_trig(N, 6, 2);
  for (double k : {7.5, 8.0, 10.0}) {
    EXPECT_LT(crucial_identity_residual(catalog_entry("kdv").equation(), f, 0.0, {k}).absolute, 1e-12);
    EXPECT_LT(crucial_identity_residual(catalog_entry("kdv_burgers").equation(), f, 0.0, {k}).absolute, 1e-12);
  }
}

TEST(Identity, CatalogProbes) {
  for (const auto& entry : catalog()) {
    const auto eq = entry.equation();
    for (const auto& f : random_probes(8, 11, 256, entry.probe_sign)) {
      for (double k : {7.5, 8.0, 10.0, 12.5}) {
        const auto r = crucial_identity_residual(eq, f, 0.3, {k});
        EXPECT_LT(r.relative, 1e-8) << entry.name << " k'=" << k;
      }
    }
  }
}

TEST(Identity, DetectsWrongGauge) {
  // Swapping in the gauge of a different index breaks the balance.
  const auto eq = catalog_entry("k22").equation();
  auto ctx = build_gauge(eq, two_plus_cos(), 0.0, {10.0});
  ctx.phi_inv = build_gauge(eq, two_plus_cos(), 0.0, {12.0}).phi_inv;
  ctx.phi = build_gauge(eq, two_plus_cos(), 0.0, {12.0}).phi;
  EXPECT_GT(crucial_identity_residual(ctx).relative, 1e-3);
}

TEST(Energy, LowIndex) {
  EXPECT_DOUBLE_EQ(energy_low_index({10.0}).value(), 7.0);
  EXPECT_DOUBLE_EQ(energy_low_index({7.0}).value(), 4.55);
  EXPECT_DOUBLE_EQ(energy_low_index({7.0}, 0.1).value(), 4.6);
}

TEST(Energy, KdvCosine) {
  const auto f = oracle::trig(N, {{1, 1.0}});
  EXPECT_NEAR(energy(catalog_entry("kdv").equation(), f, 0.0, {10.0}), 72.0, 1e-11);
}

TEST(Energy, SingleModeRatio) {
  const auto eq = catalog_entry("kdv").equation();
  for (int n : {4, 8, 16, 32}) {
    const auto f = oracle::trig(N, {{n, 1.0}});
    const double w = 1.0 + double(n) * n;
    const double closed = 0.5 * (std::pow(n, 12) * std::pow(w, 4) + std::pow(w, 7));
    const double e = energy(eq, f, 0.0, {10.0});
    EXPECT_NEAR(e / closed, 1.0, 1e-12);
    if (n == 32) EXPECT_NEAR(e / std::pow(sobolev_norm(f, {10.0}), 2), 1.0, 0.1);
  }
}

TEST(Energy, DifferenceIdentities) {
  for (const auto& entry : catalog()) {
    const auto eq = entry.equation();
    const auto probes = random_probes(2, 5, N, entry.probe_sign);
    EXPECT_EQ(energy_diff(eq, probes[0], probes[0], 0.2, {10.0}), 0.0) << entry.name;
    EXPECT_EQ(energy(eq, probes[0], 0.2, {10.0}), energy_diff(eq, probes[0], TorusFunction(N), 0.2, {10.0}));
    const double a = energy_diff(eq, probes[0], probes[1], 0.2, {10.0});
    const double b = energy_diff(eq, probes[1], probes[0], 0.2, {10.0});
    EXPECT_NEAR(a, b, 1e-12 * a);
    EXPECT_GT(a, 0.0);
  }
}

TEST(Energy, RejectsLowIndex) { EXPECT_THROW(energy(catalog_entry("kdv").equation(), two_plus_cos(), 0.0, {5.0}), Error); }

TEST(NormEquivalence, KdvModePairs) {
  const auto eq = catalog_entry("kdv").equation();
  const auto base = oracle::random_trig(N, 3, 7);
  std::vector<std::pair<TorusFunction, TorusFunction>> pairs;
  for (int n : {4, 8, 16, 32}) pairs.emplace_back(base + oracle::trig(N, {{n, 1.0}}), base);
  pairs.emplace_back(base, base);
  const auto r = norm_equivalence_report(eq, pairs, 0.0, {10.0});
  EXPECT_EQ(r.used, 4u);
  EXPECT_EQ(r.skipped, 1u);
  EXPECT_GE(r.min_ratio, 0.5);
  EXPECT_LE(r.max_ratio, 2.0);
}

TEST(NormEquivalence, K22NearPositiveState) {
  const auto eq = catalog_entry("k22").equation();
  std::vector<std::pair<TorusFunction, TorusFunction>> pairs;
  for (int n = 1; n <= 6; ++n) pairs.emplace_back(two_plus_cos() + oracle::trig(N, {{n, 0.1}}), two_plus_cos());
  const auto r = norm_equivalence_report(eq, pairs, 0.0, {10.0});
  EXPECT_TRUE(std::isfinite(r.min_ratio) && std::isfinite(r.max_ratio));
  EXPECT_GT(r.min_ratio, 0.0);
  EXPECT_LT(r.max_ratio / r.min_ratio, 1e3);
}

TEST(NormEquivalence, DegenerateSegmentThrows) {
  const auto eq = catalog_entry("k22").equation();
  const auto f = two_plus_cos();
  const auto g = TorusFunction::constant(N, -2.0);
  EXPECT_THROW(norm_equivalence_report(eq, {{f, g}}, 0.0, {10.0}), DegenerateDispersion);
}
