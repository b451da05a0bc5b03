#include "torus3/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "torus3/errors.hpp"
#include "torus3/fit.hpp"
#include "torus3/gauge.hpp"

namespace torus3 {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr int kContourPoints = 32;

double n4(std::size_t n) {
  const double d = static_cast<double>(n);
  return d * d * d * d;
}

// Coefficient-wise product with a real diagonal multiplier.
TorusFunction scale(const TorusFunction& f, const std::vector<double>& m) {
  std::vector<Complex> c(f.coeffs().begin(), f.coeffs().end());
  for (std::size_t n = 0; n < c.size(); ++n) c[n] *= m[n];
  return TorusFunction(f.grid_size(), std::move(c));
}

// a += s * m .* f, coefficient-wise.
void axpy(TorusFunction& a, const std::vector<double>& m, const TorusFunction& f, double s = 1.0) {
  std::vector<Complex> c(f.coeffs().begin(), f.coeffs().end());
  for (std::size_t n = 0; n < c.size(); ++n) c[n] *= s * m[n];
  a += TorusFunction(f.grid_size(), std::move(c));
}

bool finite(const TorusFunction& f) {
  for (const auto& c : f.coeffs()) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
  }
  return true;
}

std::vector<double> heat_multiplier(std::size_t modes, double eps, double tau) {
  std::vector<double> m(modes);
  for (std::size_t n = 0; n < modes; ++n) m[n] = std::exp(-eps * n4(n) * tau);
  return m;
}

// phi-functions of the diagonal symbol h L_n = -h eps n^4, averaged over a
// circle of radius 1 around each point.
struct EtdCoefficients {
  double h = -1.0;
  std::vector<double> e, e2, q, f1, f2, f3, phi1;

  void build(std::size_t modes, double eps, double step) {
    h = step;
    e.assign(modes, 0.0);
    e2 = q = f1 = f2 = f3 = phi1 = e;
    for (std::size_t n = 0; n < modes; ++n) {
      const double z = -eps * n4(n) * h;
      e[n] = std::exp(z);
      e2[n] = std::exp(z / 2.0);
      Complex sq = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0, sp = 0.0;
      for (int j = 1; j <= kContourPoints; ++j) {
        const double theta = kPi * (j - 0.5) / kContourPoints;
        const Complex r = z + Complex(std::cos(theta), std::sin(theta));
        const Complex er = std::exp(r);
        const Complex r3 = r * r * r;
        sq += (std::exp(r / 2.0) - 1.0) / r;
        s1 += (-4.0 - r + er * (4.0 - 3.0 * r + r * r)) / r3;
        s2 += (2.0 + r + er * (r - 2.0)) / r3;
        s3 += (-4.0 - 3.0 * r - r * r + er * (4.0 - r)) / r3;
        sp += (er - 1.0) / r;
      }
      q[n] = h * sq.real() / kContourPoints;
      f1[n] = h * s1.real() / kContourPoints;
      f2[n] = h * s2.real() / kContourPoints;
      f3[n] = h * s3.real() / kContourPoints;
      phi1[n] = h * sp.real() / kContourPoints;
    }
  }
};

class Stepper {
 public:
  Stepper(const Equation& eq, const SolveParams& p, std::size_t modes) : eq_(eq), p_(p), modes_(modes) {}

  TorusFunction step(const TorusFunction& u, double t, double h) {
    switch (p_.scheme) {
      case Scheme::ExpEuler: return exp_euler(u, t, h);
      case Scheme::ETDRK4: return etdrk4(u, t, h);
      case Scheme::PicardDuhamel: return picard(u, t, h);
    }
    throw Error("unknown scheme");
  }

 private:
  const EtdCoefficients& coeffs(double h) {
    if (etd_.h != h) etd_.build(modes_, p_.eps, h);
    return etd_;
  }

  TorusFunction exp_euler(const TorusFunction& u, double t, double h) {
    const auto& c = coeffs(h);
    TorusFunction out = scale(u, c.e);
    axpy(out, c.phi1, eval_F(eq_, u, t));
    return out;
  }

  TorusFunction etdrk4(const TorusFunction& u, double t, double h) {
    const auto& c = coeffs(h);
    const TorusFunction nu = eval_F(eq_, u, t);
    const TorusFunction eu = scale(u, c.e2);
    TorusFunction a = eu;
    axpy(a, c.q, nu);
    const TorusFunction na = eval_F(eq_, a, t + h / 2.0);
    TorusFunction b = eu;
    axpy(b, c.q, na);
    const TorusFunction nb = eval_F(eq_, b, t + h / 2.0);
    TorusFunction cc = scale(a, c.e2);
    axpy(cc, c.q, nb * 2.0 - nu);
    const TorusFunction nc = eval_F(eq_, cc, t + h);
    TorusFunction out = scale(u, c.e);
    axpy(out, c.f1, nu);
    axpy(out, c.f2, na + nb, 2.0);
    axpy(out, c.f3, nc);
    return out;
  }

  // Fixed point of the Duhamel map on one window, nodes s_j = j h / (2m).
  TorusFunction picard(const TorusFunction& u0, double t0, double h) {
    const int m2 = 2 * p_.picard.half_nodes;
    const double d = h / m2;
    if (picard_h_ != h) {
      picard_h_ = h;
      shift_.clear();
      for (int j = -1; j <= m2; ++j) shift_.push_back(heat_multiplier(modes_, p_.eps, j * d));
    }
    auto shift = [this](int j) -> const std::vector<double>& { return shift_[static_cast<std::size_t>(j + 1)]; };

    std::vector<TorusFunction> free(m2 + 1), v(m2 + 1), f(m2 + 1);
    const TorusFunction f0 = eval_F(eq_, u0, t0);
    for (int j = 0; j <= m2; ++j) {
      free[j] = scale(u0, shift(j));
      v[j] = free[j];
      axpy(v[j], shift(j), f0, j * d);
    }
    for (int it = 0; it < p_.picard.max_iterations; ++it) {
      for (int j = 0; j <= m2; ++j) f[j] = eval_F(eq_, v[j], t0 + j * d);
      double change = 0.0, size = 0.0;
      for (int j = 1; j <= m2; ++j) {
        TorusFunction next = free[j];
        const int even = j - (j % 2);
        for (int i = 0; i <= even && even > 0; ++i) {
          const double w = (i == 0 || i == even) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
          axpy(next, shift(j - i), f[i], w * d / 3.0);
        }
        if (j % 2 == 1) {
          axpy(next, shift(1), f[j - 1], 5.0 * d / 12.0);
          axpy(next, shift(0), f[j], 8.0 * d / 12.0);
          axpy(next, shift(-1), f[j + 1], -1.0 * d / 12.0);
        }
        change = std::max(change, max_coeff_diff(next, v[j]));
        for (const auto& c : next.coeffs()) size = std::max(size, std::abs(c));
        v[j] = std::move(next);
      }
      if (change <= p_.picard.tolerance * std::max(size, 1e-300)) return v[m2];
    }
    throw Error("Picard iteration did not converge");
  }

  const Equation& eq_;
  const SolveParams& p_;
  std::size_t modes_;
  EtdCoefficients etd_;
  double picard_h_ = -1.0;
  std::vector<std::vector<double>> shift_;
};

}  // namespace

std::string_view scheme_name(Scheme s) {
  switch (s) {
    case Scheme::ExpEuler: return "exp_euler";
    case Scheme::ETDRK4: return "etdrk4";
    case Scheme::PicardDuhamel: return "picard_duhamel";
  }
  return "?";
}

Scheme parse_scheme(std::string_view name) {
  for (Scheme s : {Scheme::ExpEuler, Scheme::ETDRK4, Scheme::PicardDuhamel}) {
    if (scheme_name(s) == name) return s;
  }
  throw Error("unknown scheme '" + std::string(name) + "'");
}

std::string_view termination_name(Termination t) {
  switch (t) {
    case Termination::Completed: return "completed";
    case Termination::Blowup: return "blowup";
    case Termination::DomainError: return "domain_error";
    case Termination::StepUnstable: return "step_unstable";
    case Termination::Stopped: return "stopped";
  }
  return "?";
}

void SolveParams::validate() const {
  auto need = [](bool ok, const char* field, const char* msg) {
    if (!ok) throw ConfigError(std::string("solve.") + field, msg);
  };
  need(std::isfinite(eps) && eps >= 0.0, "eps", "must be finite and nonnegative");
  need(std::isfinite(dt) && dt > 0.0, "dt", "must be positive");
  need(std::isfinite(t_end) && t_end > 0.0, "t_end", "must be positive");
  need(dt <= t_end, "dt", "must not exceed t_end");
  need(snapshot_stride >= 1, "snapshot_stride", "must be at least 1");
  need(std::isfinite(blowup_threshold) && blowup_threshold > 1.0, "blowup_threshold", "must exceed 1");
  need(std::isfinite(cfl) && cfl >= 0.0, "cfl", "must be nonnegative");
  need(eps > 0.0 || scheme == Scheme::ETDRK4, "eps", "eps = 0 is only supported by etdrk4");
  need(picard.half_nodes >= 1, "picard.half_nodes", "must be at least 1");
  need(picard.tolerance > 0.0, "picard.tolerance", "must be positive");
  need(picard.max_iterations >= 1, "picard.max_iterations", "must be at least 1");
}

double step_limit(const Equation& eq, const TorusFunction& u, double t, double cfl) {
  if (cfl <= 0.0) return std::numeric_limits<double>::infinity();
  const double a = sup_norm(dispersion_coefficient(eq, u, t));
  if (a == 0.0) return std::numeric_limits<double>::infinity();
  const double nmax = static_cast<double>(u.max_mode());
  return cfl / (a * nmax * nmax * nmax);
}

NormRecord make_record(const Equation& eq, const TorusFunction& u, double t, const SolveParams& params) {
  NormRecord r;
  r.t = t;
  r.h_k0 = sobolev_norm(u, params.k0);
  r.h_k = sobolev_norm(u, params.k);
  r.mean = average(u);
  r.l2 = sobolev_norm(u, SobolevIndex(0.0));
  r.energy = kNaN;
  try {
    const DiagnosticsRecord d = diagnostics(eq, u, t, params.k);
    r.delta = d.delta;
    r.delta_prime = d.delta_prime;
    r.q_min = d.delta > kDeltaTolerance ? d.q_min : kNaN;
    if (params.record_energy && d.delta > kDeltaTolerance && params.k.value() >= 6.0) {
      r.energy = energy(eq, u, t, params.k);
    }
  } catch (const Error&) {
    r.delta = r.delta_prime = r.q_min = kNaN;
  }
  return r;
}

bool detect_blowup(const TorusFunction& u, const TorusFunction& phi, const SolveParams& params) {
  return sobolev_norm(u, params.k0) > params.blowup_threshold * (1.0 + sobolev_norm(phi, params.k0));
}

bool detect_blowup(const Trajectory& traj, const SolveParams& params) {
  if (traj.records.empty()) return false;
  const double h = traj.records.back().h_k0;
  return !std::isfinite(h) || h > params.blowup_threshold * (1.0 + traj.records.front().h_k0);
}

Trajectory solve(const Equation& eq, const TorusFunction& phi, const SolveParams& params, const StopCallback& stop) {
  params.validate();
  Trajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(phi);
  traj.records.push_back(make_record(eq, phi, 0.0, params));

  Stepper stepper(eq, params, phi.coeffs().size());
  const auto steps = static_cast<std::size_t>(std::ceil(params.t_end / params.dt - 1e-9));
  TorusFunction u = phi;
  double t = 0.0;
  const double eps_limit = params.scheme == Scheme::PicardDuhamel && params.eps > 0.0
                               ? 2.0 * 2 * params.picard.half_nodes / (params.eps * n4(static_cast<std::size_t>(phi.max_mode())))
                               : std::numeric_limits<double>::infinity();

  try {
    for (std::size_t s = 1; s <= steps; ++s) {
      const double target = std::min(static_cast<double>(s) * params.dt, params.t_end);
      const double span = target - t;
      const double limit = std::min(step_limit(eq, u, t, params.cfl), eps_limit);
      const auto sub = static_cast<std::size_t>(std::max(1.0, std::ceil(span / limit - 1e-12)));
      const double h = span / static_cast<double>(sub);
      for (std::size_t i = 0; i < sub; ++i) {
        u = stepper.step(u, t, h);
        t = (i + 1 == sub) ? target : t + h;
        ++traj.substeps;
        if (!finite(u)) {
          std::ostringstream os;
          os << "non-finite state at t=" << t << " (h=" << h << ")";
          traj.terminated = Termination::StepUnstable;
          traj.message = os.str();
          return traj;
        }
      }
      traj.records.push_back(make_record(eq, u, t, params));
      if (s % static_cast<std::size_t>(params.snapshot_stride) == 0 || s == steps) {
        traj.times.push_back(t);
        traj.states.push_back(u);
      }
      if (detect_blowup(traj, params)) {
        traj.terminated = Termination::Blowup;
        traj.message = "H^k0 norm exceeded threshold at t=" + std::to_string(t);
        if (traj.times.back() != t) {
          traj.times.push_back(t);
          traj.states.push_back(u);
        }
        return traj;
      }
      if (stop && stop(traj.records.back(), u)) {
        traj.terminated = Termination::Stopped;
        if (traj.times.back() != t) {
          traj.times.push_back(t);
          traj.states.push_back(u);
        }
        return traj;
      }
    }
  } catch (const DomainError& e) {
    traj.terminated = Termination::DomainError;
    traj.message = e.what();
  } catch (const DegenerateDispersion& e) {
    traj.terminated = Termination::DomainError;
    traj.message = e.what();
  } catch (const Error& e) {
    traj.terminated = Termination::StepUnstable;
    traj.message = e.what();
  }
  return traj;
}

// ---------------------------------------------------------------------------
// Leading symbol of d^6 F

namespace {

struct Linearization {
  std::array<TorusFunction, 4> coef;  // dF/dw0 .. dF/dw3 along u
  Dealias dealias;

  Linearization(const Equation& eq, const TorusFunction& u, double t) : dealias(eq.dealias()) {
    const Var vars[4] = {Var::W0, Var::W1, Var::W2, Var::W3};
    for (int p = 0; p < 4; ++p) coef[p] = evaluate_field(eq, eq.partial(vars[p]), u, t);
  }

  TorusFunction apply(const TorusFunction& v) const {
    TorusFunction out(v.grid_size());
    for (int p = 0; p < 4; ++p) out += multiply(coef[p], derivative(v, p), dealias);
    return out;
  }
};

TorusFunction single_mode(std::size_t grid, int k, Complex c) {
  std::vector<Complex> co(grid / 2 + 1, 0.0);
  co[static_cast<std::size_t>(k)] = c;
  return TorusFunction(grid, std::move(co));
}

double sup_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double binomial(int n, int k) {
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

}  // namespace

LeibnizCheck leibniz_symbol_check(const Equation& eq, const TorusFunction& u, double t, std::vector<int> frequencies,
                                  double amp) {
  LeibnizCheck out;
  const double delta = min_abs(dispersion_coefficient(eq, u, t));
  if (!(delta > kDeltaTolerance)) throw DegenerateDispersion(delta, kDeltaTolerance, eq.name() + " Leibniz check");

  // Residual scaling over the frequency ladder.
  std::vector<double> ns, rs;
  for (int n : frequencies) {
    std::size_t grid = u.grid_size();
    while (grid < 4 * static_cast<std::size_t>(n)) grid *= 2;
    const TorusFunction um = u.resampled(grid);
    const Linearization lin(eq, um, t);
    const TorusFunction du = single_mode(grid, n, 0.5 * amp * std::pow(static_cast<double>(n), -9.0));
    const TorusFunction p = compute_P(eq, um, t);
    TorusFunction r = derivative(lin.apply(du), 6);
    r -= multiply(lin.coef[3], derivative(du, 9), eq.dealias());
    r -= multiply(p, derivative(du, 8), eq.dealias());
    out.frequencies.push_back(n);
    out.residual_norms.push_back(sobolev_norm(r, SobolevIndex(0.0)));
    ns.push_back(n);
    rs.push_back(out.residual_norms.back());
  }
  const bool all_positive = std::all_of(rs.begin(), rs.end(), [](double r) { return r > 0.0; });
  if (rs.size() >= 2 && all_positive) {
    out.fitted_order = fit_log_slope(ns, rs) + 9.0;
  } else {
    out.fitted_order = rs.size() >= 2 ? -std::numeric_limits<double>::infinity() : kNaN;
  }

  // Coefficient recovery on the grid of u.
  constexpr int kTop = 9;
  const std::size_t grid = u.grid_size();
  if (static_cast<int>(grid / 2) - 1 < kTop) throw Error("Leibniz check: grid of u too small for K = 0..9");
  const Linearization lin(eq, u, t);
  const auto xs = grid_points(grid);
  std::vector<std::vector<Complex>> g(kTop + 1, std::vector<Complex>(grid));
  for (int k = 0; k <= kTop; ++k) {
    const auto re = derivative(lin.apply(single_mode(grid, k, k == 0 ? 1.0 : 0.5)), 6).grid_values();
    const auto im =
        k == 0 ? std::vector<double>(grid, 0.0)
               : derivative(lin.apply(single_mode(grid, k, Complex(0.0, -0.5))), 6).grid_values();
    for (std::size_t j = 0; j < grid; ++j) {
      const Complex phase(std::cos(k * xs[j]), -std::sin(k * xs[j]));
      g[k][j] = phase * Complex(re[j], im[j]);
    }
  }
  const auto a3 = lin.coef[3].grid_values();
  const auto pv = compute_P(eq, u, t).grid_values();
  std::vector<double> d9(grid), d8(grid), e9(grid), e8(grid);
  const Complex i9(0.0, 1.0);  // i^9
  for (std::size_t j = 0; j < grid; ++j) {
    Complex s9 = 0.0, s8 = 0.0;
    for (int k = 0; k <= kTop; ++k) s9 += ((kTop - k) % 2 ? -1.0 : 1.0) * binomial(kTop, k) * g[k][j];
    for (int k = 0; k <= kTop - 1; ++k) s8 += ((kTop - 1 - k) % 2 ? -1.0 : 1.0) * binomial(kTop - 1, k) * g[k][j];
    const Complex c9 = s9 / (factorial(kTop) * i9);
    const Complex c8 = s8 / factorial(kTop - 1) - 36.0 * i9 * c9;  // i^8 = 1
    e9[j] = c9.real() - a3[j];
    e8[j] = c8.real() - pv[j];
  }
  const double a3_scale = sup_abs(a3);
  const double p_scale = sup_abs(pv) > 0.0 ? sup_abs(pv) : a3_scale;
  out.coeff_err = sup_abs(e9) / a3_scale;
  out.next_coeff_err = sup_abs(e8) / p_scale;
  return out;
}

}  // namespace torus3
