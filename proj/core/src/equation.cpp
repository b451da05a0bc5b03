#include "torus3/equation.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "torus3/errors.hpp"

namespace torus3 {

namespace {

constexpr std::array<Var, kVarCount> kAllVars = {Var::W3, Var::W2, Var::W1, Var::W0, Var::X, Var::T};

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// Uniform double in [0, 1) from the top 53 bits; stable across standard libraries.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

std::string_view resonance_name(Resonance r) {
  switch (r) {
    case Resonance::NonParabolic: return "non-parabolic";
    case Resonance::Parabolic: return "parabolic";
    case Resonance::Inconclusive: return "inconclusive";
  }
  return "?";
}

std::string_view data_set_name(DataSet s) {
  switch (s) {
    case DataSet::Pk: return "Pk";
    case DataSet::PkPlus: return "PkPlus";
    case DataSet::PkMinus: return "PkMinus";
  }
  return "?";
}

Equation::Equation(std::string name, Expr f, Dealias dealias)
    : name_(std::move(name)), f_(std::move(f)), dealias_(dealias) {
  for (Var v : kAllVars) first_[static_cast<std::size_t>(v)] = f_.derivative(v);
  const Expr& a3 = first_[static_cast<std::size_t>(Var::W3)];
  for (Var v : kAllVars) second_w3_[static_cast<std::size_t>(v)] = a3.derivative(v);
}

Equation Equation::time_reversed() const {
  const Expr minus_t = -Expr::variable(Var::T);
  return Equation(name_ + "_reversed", -f_.substitute(Var::T, minus_t), dealias_);
}

Equation Equation::with_dealias(Dealias d) const { return Equation(name_, f_, d); }

std::uint64_t Equation::fingerprint() const { return fnv1a(name_ + "|" + f_.to_string()); }

Equation partial(const Equation& eq, Var which) {
  return Equation("d" + eq.name() + "/d" + std::string(var_name(which)), eq.partial(which), eq.dealias());
}

GridArgs Jet::args() const {
  GridArgs a;
  a.size = points;
  a.columns[static_cast<std::size_t>(Var::W3)] = w3;
  a.columns[static_cast<std::size_t>(Var::W2)] = w2;
  a.columns[static_cast<std::size_t>(Var::W1)] = w1;
  a.columns[static_cast<std::size_t>(Var::W0)] = w0;
  a.columns[static_cast<std::size_t>(Var::X)] = x;
  a.scalar[static_cast<std::size_t>(Var::T)] = t;
  return a;
}

Jet make_jet(const TorusFunction& f, double t, std::size_t points, const Expr* only) {
  Jet j;
  j.points = points;
  j.t = t;
  auto want = [only](Var v) { return only == nullptr || only->depends_on(v); };
  if (want(Var::W0)) j.w0 = f.sample(points);
  if (want(Var::W1)) j.w1 = derivative(f, 1).sample(points);
  if (want(Var::W2)) j.w2 = derivative(f, 2).sample(points);
  if (want(Var::W3)) j.w3 = derivative(f, 3).sample(points);
  if (want(Var::X)) j.x = grid_points(points);
  return j;
}

TorusFunction evaluate_field(const Equation& eq, const Expr& e, const TorusFunction& f, double t) {
  double c;
  if (e.is_constant(&c)) return TorusFunction::constant(f.grid_size(), c);
  const std::size_t m = padded_size(f.grid_size(), eq.dealias());
  const Jet jet = make_jet(f, t, m, &e);
  std::vector<double> out(m);
  e.evaluate(jet.args(), out, jet.spacing());
  return TorusFunction::from_grid(out).resampled(f.grid_size());
}

TorusFunction eval_F(const Equation& eq, const TorusFunction& f, double t) {
  return evaluate_field(eq, eq.expr(), f, t);
}

TorusFunction dispersion_coefficient(const Equation& eq, const TorusFunction& f, double t) {
  return evaluate_field(eq, eq.partial(Var::W3), f, t);
}

TorusFunction compute_P(const Equation& eq, const TorusFunction& f, double t) {
  const std::size_t m = padded_size(f.grid_size(), eq.dealias());
  const Jet jet = make_jet(f, t, m);
  const auto w4 = derivative(f, 4).sample(m);
  const GridArgs args = jet.args();
  std::vector<double> p(m);
  eq.partial(Var::W2).evaluate(args, p, jet.spacing());

  // p = -1 pairs with the constant 1, p = 0..3 with d^{p+1} f.
  const std::array<std::pair<Var, const std::vector<double>*>, 5> terms = {{
      {Var::X, nullptr},
      {Var::W0, &jet.w1},
      {Var::W1, &jet.w2},
      {Var::W2, &jet.w3},
      {Var::W3, &w4},
  }};
  std::vector<double> tmp(m);
  for (const auto& [v, factor] : terms) {
    const Expr& second = eq.partial_w3(v);
    double c;
    if (second.is_constant(&c) && c == 0.0) continue;
    second.evaluate(args, tmp, jet.spacing());
    for (std::size_t j = 0; j < m; ++j) p[j] += 6.0 * tmp[j] * (factor ? (*factor)[j] : 1.0);
  }
  return TorusFunction::from_grid(p).resampled(f.grid_size());
}

namespace {

struct ResonanceParts {
  TorusFunction a3;
  TorusFunction p;
  double average = 0.0;
  double delta = 0.0;
};

ResonanceParts resonance_parts(const Equation& eq, const TorusFunction& f, double t) {
  ResonanceParts r{dispersion_coefficient(eq, f, t), compute_P(eq, f, t), 0.0, 0.0};
  r.delta = min_abs(r.a3);
  if (!(r.delta > kDeltaTolerance)) throw DegenerateDispersion(r.delta, kDeltaTolerance, eq.name());
  const TorusFunction* in[] = {&r.p, &r.a3};
  const TorusFunction ratio =
      pointwise(in, [](std::span<const double> v) { return v[0] / v[1]; }, eq.dealias());
  r.average = average(ratio);
  return r;
}

}  // namespace

double resonance_average(const Equation& eq, const TorusFunction& f, double t) {
  return resonance_parts(eq, f, t).average;
}

TorusFunction compute_Q(const Equation& eq, const TorusFunction& f, double t) {
  const auto parts = resonance_parts(eq, f, t);
  return parts.a3 * parts.average;
}

DiagnosticsRecord diagnostics(const Equation& eq, const TorusFunction& f, double t, SobolevIndex /*k*/) {
  DiagnosticsRecord d;
  const TorusFunction a3 = dispersion_coefficient(eq, f, t);
  d.delta = min_abs(a3);
  if (!(d.delta > kDeltaTolerance)) return d;
  d.sign_a3 = a3.value_at(0.0) > 0.0 ? 1 : -1;
  const auto parts = resonance_parts(eq, f, t);
  const TorusFunction q = parts.a3 * parts.average;
  d.q_min = min_value(q);
  d.q_max = max_value(q);
  d.delta_prime = min_abs(q);
  d.breve_delta = parts.average * d.sign_a3;
  return d;
}

Resonance classify_resonance(const Equation& eq, const std::vector<Probe>& probes, double tol) {
  bool all_zero = true;
  for (const auto& probe : probes) {
    const double avg = std::abs(resonance_average(eq, probe.f, probe.t));
    if (avg > 10.0 * tol) return Resonance::Parabolic;
    if (!(avg < tol)) all_zero = false;
  }
  return all_zero ? Resonance::NonParabolic : Resonance::Inconclusive;
}

std::set<DataSet> membership(const Equation& eq, const TorusFunction& f, double t, SobolevIndex k, double tol) {
  std::set<DataSet> out;
  const DiagnosticsRecord d = diagnostics(eq, f, t, k);
  if (!(d.delta > tol)) return out;
  out.insert(DataSet::Pk);
  if (d.q_min > tol) out.insert(DataSet::PkPlus);
  if (d.q_max < -tol) out.insert(DataSet::PkMinus);
  return out;
}

std::vector<TorusFunction> random_probes(std::size_t count, std::uint64_t seed, std::size_t grid_size,
                                         ProbeSign sign, int max_degree) {
  std::mt19937_64 rng(seed);
  std::vector<TorusFunction> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const int degree = 1 + static_cast<int>(unit(rng) * max_degree);
    std::vector<Complex> c(grid_size / 2 + 1, 0.0);
    c[0] = unit(rng) - 0.5;
    double l1 = 0.0;
    for (int n = 1; n <= std::min(degree, static_cast<int>(grid_size / 2) - 1); ++n) {
      const double decay = std::exp(-0.5 * (n - 1));
      c[static_cast<std::size_t>(n)] = Complex(unit(rng) - 0.5, unit(rng) - 0.5) * decay;
      l1 += 2.0 * std::abs(c[static_cast<std::size_t>(n)]);
    }
    // Oscillation amplitude normalised to at most 1.
    if (l1 > 1.0) {
      for (std::size_t n = 1; n < c.size(); ++n) c[n] /= l1;
    }
    TorusFunction f(grid_size, std::move(c));
    if (sign == ProbeSign::Positive) {
      f += TorusFunction::constant(grid_size, 1.0 - min_value(f));
    }
    out.push_back(std::move(f));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Catalog

Equation CatalogEntry::equation() const { return make_equation(name, f_text, coefficients); }

const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> entries = {
      {"kdv", "KdV", "-w3 - 6*w0*w1", {}, Resonance::NonParabolic, ProbeSign::Any, "1", "0", true},
      {"transition_kdv", "transition KdV", "-w3 - 6*h*w0*w1", {{"h", "1 + 0.5*sin(t)"}}, Resonance::NonParabolic,
       ProbeSign::Any, "1", "0", true},
      {"k22", "Rosenau-Hyman K(2,2)", "2*w0*w1 + 6*w1*w2 + 2*w0*w3", {}, Resonance::NonParabolic,
       ProbeSign::Positive, "2 inf|f|", "18 ∂_x f", true},
      {"harry_dym", "Harry-Dym", "w0^3*w3", {}, Resonance::NonParabolic, ProbeSign::Positive, "inf|f|³",
       "18 f² ∂_x f", false},
      {"kdv_burgers", "KdV-Burgers", "-w3 + w2 + 2*w0*w1", {}, Resonance::Parabolic, ProbeSign::Any, "1", "1",
       true},
      {"var_kdv",
       "variable-coefficient KdV",
       "a*w3 + b*w2 + c*w1 + d*w0 + e",
       {{"a", "-(1.5 + 0.5*sin(x))"},
        {"b", "1 + 0.5*cos(x)"},
        {"c", "0.5*sin(x)"},
        {"d", "0.1*cos(x)"},
        {"e", "0.1*sin(x)"}},
       Resonance::Parabolic,
       ProbeSign::Any,
       "inf|a(·,0)|",
       "6 ∂_x a + b",
       false},
  };
  return entries;
}

std::optional<std::reference_wrapper<const CatalogEntry>> find_catalog_entry(std::string_view name) {
  for (const auto& e : catalog()) {
    if (e.name == name) return std::cref(e);
  }
  return std::nullopt;
}

const CatalogEntry& catalog_entry(std::string_view name) {
  auto e = find_catalog_entry(name);
  if (!e) throw Error("unknown catalog equation '" + std::string(name) + "'");
  return *e;
}

Equation make_equation(std::string name, std::string_view f_text,
                       const std::map<std::string, std::string>& coefficients) {
  std::map<std::string, Expr, std::less<>> named;
  // Coefficients may refer to each other; resolve until no progress.
  std::map<std::string, std::string> pending = coefficients;
  while (!pending.empty()) {
    bool progress = false;
    std::string last_error;
    for (auto it = pending.begin(); it != pending.end();) {
      try {
        Expr e = parse_expression(it->second, named);
        if (e.depends_on(Var::W3) || e.depends_on(Var::W2) || e.depends_on(Var::W1) || e.depends_on(Var::W0)) {
          throw ParseError("coefficient '" + it->first + "' may depend only on x and t", 0);
        }
        named.emplace(it->first, std::move(e));
        it = pending.erase(it);
        progress = true;
      } catch (const ParseError& err) {
        last_error = it->first + ": " + err.what();
        ++it;
      }
    }
    if (!progress) throw ParseError("cannot resolve coefficients (" + last_error + ")", 0);
  }
  return Equation(std::move(name), parse_expression(f_text, named));
}

Equation parse_equation(std::string_view text, std::string default_name) {
  std::string name = std::move(default_name);
  std::string f_text;
  std::map<std::string, std::string> coefficients;
  std::istringstream in{std::string(text)};
  std::string line;
  int lines_seen = 0;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    ++lines_seen;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (!f_text.empty()) throw ParseError("second bare expression in equation definition", 0);
      f_text = line;
      continue;
    }
    std::string lhs = trim(std::string_view(line).substr(0, eq));
    const std::string rhs = trim(std::string_view(line).substr(eq + 1));
    if (auto paren = lhs.find('('); paren != std::string::npos) lhs = trim(std::string_view(lhs).substr(0, paren));
    if (lhs == "F") {
      f_text = rhs;
    } else if (lhs == "name") {
      name = rhs;
    } else if (lhs.empty()) {
      throw ParseError("empty left-hand side", 0);
    } else {
      coefficients[lhs] = rhs;
    }
  }
  if (f_text.empty()) throw ParseError("equation definition has no F", 0);
  return make_equation(std::move(name), f_text, coefficients);
}

}  // namespace torus3
