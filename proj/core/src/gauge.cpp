#include "torus3/gauge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "torus3/errors.hpp"

namespace torus3 {

namespace {

double gauge_power(SobolevIndex k_prime) { return (2.0 * k_prime.value() - 15.0) / 6.0; }

}  // namespace

GaugeContext build_gauge(const Equation& eq, const TorusFunction& f, double t, SobolevIndex k_prime) {
  GaugeContext g;
  g.k_prime = k_prime;
  g.t = t;
  g.a3 = dispersion_coefficient(eq, f, t);
  const double delta = min_abs(g.a3);
  if (!(delta > kDeltaTolerance)) throw DegenerateDispersion(delta, kDeltaTolerance, eq.name() + " gauge");
  g.p_field = compute_P(eq, f, t);

  const TorusFunction* pa[] = {&g.p_field, &g.a3};
  TorusFunction integrand =
      pointwise(pa, [](std::span<const double> v) { return v[0] / v[1]; }, eq.dealias());
  g.resonance_average = average(integrand);
  integrand -= TorusFunction::constant(f.grid_size(), g.resonance_average);
  integrand *= 1.0 / 3.0;
  const TorusFunction exponent = antiderivative_from_zero(integrand);

  const double power = gauge_power(k_prime);
  const TorusFunction* ae[] = {&g.a3, &exponent};
  g.phi = pointwise(
      ae, [power](std::span<const double> v) { return std::exp(power * std::log(std::abs(v[0])) + v[1]); },
      eq.dealias());
  g.phi_inv = pointwise(
      ae, [power](std::span<const double> v) { return std::exp(-power * std::log(std::abs(v[0])) - v[1]); },
      eq.dealias());
  g.q_field = g.a3 * g.resonance_average;
  g.source_fingerprint = fingerprint(f) ^ (eq.fingerprint() + 0x9e3779b97f4a7c15ULL + std::hash<double>{}(t));
  return g;
}

IdentityResidual crucial_identity_residual(const GaugeContext& g) {
  const TorusFunction da3 = derivative(g.a3, 1);
  const TorusFunction dphi_inv = derivative(g.phi_inv, 1);
  const TorusFunction* in[] = {&g.phi, &dphi_inv, &g.a3};
  TorusFunction lhs = pointwise(in, [](std::span<const double> v) { return 3.0 * v[0] * v[1] * v[2]; },
                                Dealias::Double);
  lhs += da3 * (g.k_prime.value() - 7.5);
  lhs += g.p_field;
  lhs -= g.q_field;
  IdentityResidual r;
  r.absolute = sup_norm(lhs);
  const double scale = sup_norm(g.p_field) + sup_norm(g.q_field);
  r.relative = scale > 0.0 ? r.absolute / scale : r.absolute;
  return r;
}

IdentityResidual crucial_identity_residual(const Equation& eq, const TorusFunction& f, double t,
                                           SobolevIndex k_prime) {
  return crucial_identity_residual(build_gauge(eq, f, t, k_prime));
}

SobolevIndex energy_low_index(SobolevIndex k_prime, double eta) {
  const double top = k_prime.value() - 3.0;
  if (top > 4.5 + eta) return SobolevIndex(top);
  return SobolevIndex::plus(4.5, eta);
}

double energy_diff(const Equation& eq, const TorusFunction& f, const TorusFunction& g, double t,
                   SobolevIndex k_prime) {
  if (k_prime.value() < 6.0) throw Error("energy: k' must be at least 6");
  if (f.grid_size() != g.grid_size()) throw Error("energy: grid size mismatch");
  const GaugeContext gf = build_gauge(eq, f, t, k_prime);
  TorusFunction top = multiply(gf.phi, derivative(f, 6), Dealias::Double);
  if (!g.is_zero()) {
    const GaugeContext gg = build_gauge(eq, g, t, k_prime);
    top -= multiply(gg.phi, derivative(g, 6), Dealias::Double);
  }
  const double a = sobolev_norm(top, SobolevIndex(k_prime.value() - 6.0));
  const double b = sobolev_norm(f - g, energy_low_index(k_prime));
  return a * a + b * b;
}

double energy(const Equation& eq, const TorusFunction& f, double t, SobolevIndex k_prime) {
  return energy_diff(eq, f, TorusFunction(f.grid_size()), t, k_prime);
}

NormEquivalence norm_equivalence_report(const Equation& eq,
                                        const std::vector<std::pair<TorusFunction, TorusFunction>>& pairs,
                                        double t, SobolevIndex k_prime) {
  NormEquivalence rep;
  rep.min_ratio = std::numeric_limits<double>::infinity();
  rep.max_ratio = 0.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& [f, g] = pairs[i];
    const TorusFunction diff = f - g;
    if (diff.is_zero()) {
      ++rep.skipped;
      continue;
    }
    for (int j = 0; j <= 10; ++j) {
      const double theta = 0.1 * j;
      const TorusFunction h = f * theta + g * (1.0 - theta);
      const double delta = min_abs(dispersion_coefficient(eq, h, t));
      if (!(delta > kDeltaTolerance)) {
        std::ostringstream os;
        os << eq.name() << " pair " << i << " theta=" << theta;
        throw DegenerateDispersion(delta, kDeltaTolerance, os.str());
      }
    }
    const double d = sobolev_norm(diff, k_prime);
    const double ratio = energy_diff(eq, f, g, t, k_prime) / (d * d);
    rep.min_ratio = std::min(rep.min_ratio, ratio);
    rep.max_ratio = std::max(rep.max_ratio, ratio);
    ++rep.used;
  }
  if (rep.used == 0) rep.min_ratio = 0.0;
  return rep;
}

}  // namespace torus3
