#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "torus3/errors.hpp"
#include "torus3/fit.hpp"
#include "torus3/io.hpp"
#include "torus3/spectral.hpp"

using namespace torus3;
using oracle::Trig;

namespace {

constexpr std::size_t N = 64;

double max_err(const TorusFunction& f, const std::function<double(double)>& g) {
  return oracle::sup_on_grid([&](double x) { return f.value_at(x) - g(x); }, 257);
}

}  // namespace

TEST(TorusFunction, GridRoundTrip) {
  const auto f = oracle::random_trig(N, 20, 1, 0.3);
  const auto g = TorusFunction::from_grid(f.grid_values());
  EXPECT_LT(max_coeff_diff(f, g), 1e-15);
}

TEST(TorusFunction, HermitianAndAverage) {
  const auto f = oracle::random_trig(N, 10, 2, 1.25);
  for (int n = 1; n < 10; ++n) EXPECT_EQ(f.coeff(-n), std::conj(f.coeff(n)));
  EXPECT_DOUBLE_EQ(average(f), 1.25);
  const auto vals = f.grid_values();
  double mean = 0.0;
  for (double v : vals) mean += v / vals.size();
  EXPECT_NEAR(average(f), mean, 1e-14);
}

TEST(TorusFunction, NyquistIsDropped) {
  std::vector<double> v(8);
  for (std::size_t j = 0; j < 8; ++j) v[j] = (j % 2) ? -1.0 : 1.0;  // cos(4x)
  EXPECT_TRUE(TorusFunction::from_grid(v).is_zero());
}

TEST(TorusFunction, SeriesMatchesDirectSum) {
  const auto f = oracle::random_trig(N, 12, 3);
  const auto s = oracle::spectrum(f);
  for (double x : {0.0, 0.3, 1.7, 4.1, 6.2}) EXPECT_NEAR(f.value_at(x), oracle::series(s, x), 1e-13);
}

TEST(TorusFunction, ResampleKeepsLowModes) {
  const auto f = oracle::random_trig(N, 12, 4);
  EXPECT_EQ(max_coeff_diff(f, f.resampled(256)), 0.0);
  const auto small = f.resampled(16);
  EXPECT_EQ(small.max_mode(), 7);
  EXPECT_EQ(small.coeff(7), f.coeff(7));
  EXPECT_EQ(small.coeff(8), Complex{});
}

TEST(Derivative, Examples) {
  EXPECT_LT(max_err(derivative(oracle::trig(N, {{1, 1.0}}), 1), [](double x) { return -std::sin(x); }), 1e-14);
  EXPECT_TRUE(derivative(TorusFunction::constant(N, 3.0), 2).is_zero());
  EXPECT_LT(max_err(derivative(oracle::trig(N, {{3, 0.0, 1.0}}), 2), [](double x) { return -9 * std::sin(3 * x); }),
            1e-13);
}

TEST(Derivative, MultiplierOracle) {
  const auto f = oracle::random_trig(N, 25, 5);
  for (int order : {0, 1, 2, 3, 6, 9}) {
    const auto d = derivative(f, order);
    for (int n = -25; n <= 25; ++n) {
      const Complex expect = std::pow(Complex(0.0, n), order) * f.coeff(n);
      EXPECT_LE(std::abs(d.coeff(n) - expect), 1e-15 * std::max(1.0, std::abs(expect))) << order << ' ' << n;
    }
  }
}

TEST(Sobolev, Examples) {
  EXPECT_NEAR(sobolev_norm(TorusFunction::constant(N, -2.5), {7.0}), 2.5, 1e-15);
  const auto c = oracle::trig(N, {{1, 1.0}});
  EXPECT_NEAR(sobolev_norm(c, {0.0}), std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(sobolev_norm(c, {1.0}), 1.0, 1e-15);
  EXPECT_NEAR(homogeneous_norm(c, {5.0}), std::sqrt(0.5), 1e-15);
}

TEST(Sobolev, AgreesWithDirectSumAndParseval) {
  const auto f = oracle::random_trig(N, 20, 6, 0.7);
  const auto s = oracle::spectrum(f);
  for (double k : {0.0, 1.5, 4.55, 10.0}) EXPECT_NEAR(sobolev_norm(f, {k}) / oracle::sobolev(s, k), 1.0, 1e-13);
  const double l2sq = oracle::trapezoid([&](double x) { return std::pow(oracle::series(s, x), 2); }, 0, kTwoPi, 128);
  EXPECT_NEAR(std::pow(sobolev_norm(f, {0.0}), 2), l2sq / kTwoPi, 1e-11 * l2sq);
}

TEST(Sobolev, PlusIndex) {
  const auto s = SobolevIndex::plus(4.5);
  EXPECT_DOUBLE_EQ(s.value(), 4.55);
  EXPECT_DOUBLE_EQ(SobolevIndex::plus(4.5, 0.2).value(), 4.7);
}

TEST(Average, Examples) {
  EXPECT_EQ(average(TorusFunction::constant(N, 4.0)), 4.0);
  EXPECT_EQ(average(oracle::trig(N, {{1, 1.0}})), 0.0);
  EXPECT_EQ(average(oracle::trig(N, {{0, 2.0}, {5, 0.0, 1.0}})), 2.0);
}

TEST(Antiderivative, Examples) {
  EXPECT_LT(max_err(antiderivative_from_zero(oracle::trig(N, {{1, 1.0}})), [](double x) { return std::sin(x); }),
            1e-14);
  EXPECT_LT(max_err(antiderivative_from_zero(oracle::trig(N, {{1, 0.0, 1.0}})),
                    [](double x) { return 1.0 - std::cos(x); }),
            1e-14);
  EXPECT_TRUE(antiderivative_from_zero(TorusFunction(N)).is_zero());
}

TEST(Antiderivative, QuadratureOracle) {
  const auto f = oracle::random_trig(N, 15, 7);
  const auto s = oracle::spectrum(f);
  const auto g = antiderivative_from_zero(f);
  for (double x : {0.0, 0.9, 2.5, 5.0}) {
    const double q = oracle::simpson([&](double y) { return oracle::series(s, y); }, 0.0, x, 20000);
    EXPECT_NEAR(g.value_at(x), q, 1e-10);
  }
  EXPECT_NEAR(g.value_at(0.0), 0.0, 1e-15);
}

TEST(Antiderivative, InvertsDerivative) {
  const auto f = oracle::random_trig(N, 20, 8);
  EXPECT_LT(max_coeff_diff(derivative(antiderivative_from_zero(f), 1), f), 1e-12);
}

TEST(Antiderivative, RejectsNonzeroMean) {
  const auto f = oracle::trig(N, {{0, 0.1}, {1, 1.0}});
  EXPECT_THROW(antiderivative_from_zero(f), NonZeroMean);
  try {
    antiderivative_from_zero(f);
  } catch (const NonZeroMean& e) {
    EXPECT_DOUBLE_EQ(e.mean(), 0.1);
  }
  EXPECT_NO_THROW(antiderivative_from_zero(f, 0.2));
}

TEST(Multiply, Examples) {
  const auto c = oracle::trig(N, {{1, 1.0}});
  EXPECT_LT(max_coeff_diff(multiply(c, c), oracle::trig(N, {{0, 0.5}, {2, 0.5}})), 1e-16);
  const auto f = oracle::random_trig(N, 20, 9);
  EXPECT_LT(max_coeff_diff(multiply(f, TorusFunction::constant(N, 1.0)), f), 1e-15);
}

TEST(Multiply, BruteForceConvolution) {
  // Inputs band-limited to N/3: the padded product is exact on the stored band.
  for (Dealias d : {Dealias::ThreeHalves, Dealias::Double}) {
    const auto f = oracle::random_trig(N, N / 3, 10, 0.2);
    const auto g = oracle::random_trig(N, N / 3, 11, -0.4);
    const auto conv = oracle::convolve(oracle::spectrum(f), oracle::spectrum(g));
    const auto p = multiply(f, g, d);
    for (int n = 0; n <= p.max_mode(); ++n) EXPECT_LT(std::abs(p.coeff(n) - conv.at(n)), 1e-12) << n;
  }
}

TEST(Multiply, CommutativeAndBilinear) {
  const auto f = oracle::random_trig(N, 30, 12), g = oracle::random_trig(N, 30, 13), h = oracle::random_trig(N, 30, 14);
  EXPECT_LT(max_coeff_diff(multiply(f, g), multiply(g, f)), 1e-12);
  EXPECT_LT(max_coeff_diff(multiply(2.0 * f + h, g), 2.0 * multiply(f, g) + multiply(h, g)), 1e-12);
}

TEST(Mollify, Examples) {
  const auto c = TorusFunction::constant(N, 3.0);
  for (double s : {0.0, 2.0, 10.0}) EXPECT_NEAR(average(mollify(c, 0.3, s)), 3.0 * std::exp(-0.3), 1e-15);
  const auto f = oracle::random_trig(N, 20, 15);
  EXPECT_LT(max_coeff_diff(mollify(f, 1e-15, 3.0), f), 1e-10);
}

TEST(Mollify, MultiplierOracle) {
  const auto f = oracle::random_trig(N, 25, 16, 1.0);
  const auto m = mollify(f, 0.01, 2.5);
  for (int n = 0; n <= 25; ++n) {
    const double w = std::exp(-0.01 * std::pow(1.0 + double(n) * n, 1.25));
    EXPECT_LE(std::abs(m.coeff(n) - w * f.coeff(n)), 1e-16 + 1e-14 * std::abs(w * f.coeff(n)));
  }
}

TEST(Mollify, ScalingOfOperatorNorms) {
  // Worst case over single modes of |J f - f|_{H^{s-j}} / |f|_H^s and |J f|_{H^{s+l}} / |f|_{H^s}.
  const double s = 10.0, j = 2.0, l = 2.0;
  std::vector<double> eps, lo, hi;
  for (int p = 4; p <= 10; ++p) {
    const double e = std::ldexp(1.0, -p);
    double a = 0.0, b = 0.0;
    for (int n = 0; n < 128; ++n) {
      const auto f = oracle::trig(256, {{n, 1.0}});
      const auto jf = mollify(f, e, s);
      a = std::max(a, sobolev_norm(jf - f, {s - j}) / sobolev_norm(f, {s}));
      b = std::max(b, sobolev_norm(jf, {s + l}) / sobolev_norm(f, {s}));
    }
    eps.push_back(e);
    lo.push_back(a);
    hi.push_back(b);
  }
  EXPECT_NEAR(fit_log_slope(eps, lo), j / s, 0.05);
  EXPECT_NEAR(fit_log_slope(eps, hi), -l / s, 0.05);
}

TEST(Heat, Examples) {
  const auto c = oracle::trig(N, {{1, 1.0}});
  EXPECT_LT(max_coeff_diff(heat_semigroup(c, 1.0), std::exp(-1.0) * c), 1e-17);
  const auto k = TorusFunction::constant(N, 2.0);
  EXPECT_EQ(max_coeff_diff(heat_semigroup(k, 5.0), k), 0.0);
}

TEST(Heat, SemigroupLawAndContraction) {
  const auto f = oracle::random_trig(N, 25, 17, 0.5);
  const auto a = heat_semigroup(heat_semigroup(f, 1e-5), 3e-5);
  const auto b = heat_semigroup(f, 4e-5);
  EXPECT_LT(max_coeff_diff(a, b), 1e-13);
  for (double tau : {0.0, 1e-6, 1e-3, 1.0}) {
    for (double s : {0.0, 3.0, 10.0}) EXPECT_LE(sobolev_norm(heat_semigroup(f, tau), {s}), sobolev_norm(f, {s}));
  }
}

TEST(Extrema, OversampledMinMax) {
  const auto f = oracle::trig(N, {{0, 2.0}, {1, 1.0}});
  EXPECT_NEAR(min_value(f), 1.0, 1e-12);
  EXPECT_NEAR(max_value(f), 3.0, 1e-12);
  EXPECT_NEAR(min_abs(oracle::trig(N, {{1, 1.0}})), 0.0, 1e-12);
  EXPECT_NEAR(sup_norm(oracle::trig(N, {{0, -1.0}, {1, 1.0}})), 2.0, 1e-12);
}

TEST(Pointwise, MatchesFunctionOfValues) {
  const auto f = oracle::trig(N, {{0, 2.0}, {1, 0.5}});
  const auto g = pointwise(f, [](double v) { return v * v; });
  EXPECT_LT(max_coeff_diff(g, oracle::trig(N, {{0, 4.125}, {1, 2.0}, {2, 0.125}})), 1e-14);
}

TEST(Fingerprint, StableAndSensitive) {
  const auto f = oracle::random_trig(N, 10, 18);
  EXPECT_EQ(fingerprint(f), fingerprint(TorusFunction(N, {f.coeffs().begin(), f.coeffs().end()})));
  EXPECT_NE(fingerprint(f), fingerprint(f * (1.0 + 1e-15)));
  EXPECT_NE(fingerprint(f), fingerprint(f.resampled(2 * N)));
}

TEST(Serialization, JsonRoundTripIsExact) {
  const auto f = oracle::random_trig(N, 31, 19, -0.3);
  const auto g = function_from_json(function_to_json(f));
  EXPECT_EQ(g.grid_size(), N);
  EXPECT_EQ(fingerprint(f), fingerprint(g));
  EXPECT_THROW(function_from_json("{\"grid_size\": 8, \"coeffs\": [[1, 0]]}"), Error);
  EXPECT_THROW(function_from_json("not json"), Error);
}
