#pragma once

// Fully nonlinear third-order right-hand sides  u_t = F(u_xxx, u_xx, u_x, u, x, t)
// and their structural diagnostics: the dispersion coefficient dF/dw3, the
// transport field P, the averaged field Q, and resonance classification.

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "torus3/expression.hpp"
#include "torus3/spectral.hpp"

namespace torus3 {

/// inf_x |dF/dw3| at or below this value counts as degenerate dispersion.
inline constexpr double kDeltaTolerance = 1e-10;
/// |[P / dF/dw3]_ave| below this is "zero" for resonance sampling.
inline constexpr double kResonanceTolerance = 1e-9;

enum class Resonance { NonParabolic, Parabolic, Inconclusive };
std::string_view resonance_name(Resonance r);

/// Which probes are admissible (positivity of u is needed when dF/dw3 vanishes with u).
enum class ProbeSign { Any, Positive };

/// An immutable right-hand side F with cached first and mixed second partials.
class Equation {
 public:
  Equation(std::string name, Expr f, Dealias dealias = Dealias::ThreeHalves);

  const std::string& name() const noexcept { return name_; }
  const Expr& expr() const noexcept { return f_; }
  Dealias dealias() const noexcept { return dealias_; }

  /// dF/dv for any argument.
  const Expr& partial(Var v) const noexcept { return first_[static_cast<std::size_t>(v)]; }
  /// d^2F/(dw3 dv).
  const Expr& partial_w3(Var v) const noexcept { return second_w3_[static_cast<std::size_t>(v)]; }

  /// F~(w, t) := -F(w, -t); its forward solutions are backward solutions of F.
  Equation time_reversed() const;
  /// The same F with a different dealiasing rule.
  Equation with_dealias(Dealias d) const;

  std::uint64_t fingerprint() const;

 private:
  std::string name_;
  Expr f_;
  Dealias dealias_;
  std::array<Expr, kVarCount> first_;
  std::array<Expr, kVarCount> second_w3_;
};

/// Exact symbolic partial of F as a new equation named "d<name>/d<var>".
Equation partial(const Equation& eq, Var which);

/// The jet (d^3 f, d^2 f, d f, f, x) sampled on an M-point grid.
struct Jet {
  std::size_t points = 0;
  double t = 0.0;
  std::vector<double> w3, w2, w1, w0, x;

  GridArgs args() const;
  double spacing() const { return kTwoPi / static_cast<double>(points); }
};

/// With `only`, columns the expression does not use are left empty.
Jet make_jet(const TorusFunction& f, double t, std::size_t points, const Expr* only = nullptr);

/// Evaluates an expression in the jet of f pointwise on the padded grid of the
/// equation and transforms back (truncating to f's band).
TorusFunction evaluate_field(const Equation& eq, const Expr& e, const TorusFunction& f, double t);

/// F(d^3 f, d^2 f, d f, f, x, t).
TorusFunction eval_F(const Equation& eq, const TorusFunction& f, double t);

/// dF/dw3 evaluated along f.
TorusFunction dispersion_coefficient(const Equation& eq, const TorusFunction& f, double t);

/// P(f,t) = dF/dw2 + 6 sum_{p=-1}^{3} d^2F/(dw3 dw_p) d^{p+1} f, with the p = -1
/// term pairing d^2F/(dw3 dx) with 1.
TorusFunction compute_P(const Equation& eq, const TorusFunction& f, double t);

/// The scalar [P / dF/dw3]_ave.  Throws DegenerateDispersion.
double resonance_average(const Equation& eq, const TorusFunction& f, double t);

/// Q(f,t) = dF/dw3 * [P / dF/dw3]_ave.  Throws DegenerateDispersion.
TorusFunction compute_Q(const Equation& eq, const TorusFunction& f, double t);

struct DiagnosticsRecord {
  double delta = 0.0;        ///< inf_x |dF/dw3|
  double delta_prime = 0.0;  ///< inf_x |Q|  (0 when delta is degenerate)
  double breve_delta = 0.0;  ///< [P / |dF/dw3|]_ave  (0 when degenerate)
  double q_min = 0.0;
  double q_max = 0.0;
  int sign_a3 = 0;           ///< constant sign of dF/dw3, 0 if it vanishes
};

DiagnosticsRecord diagnostics(const Equation& eq, const TorusFunction& f, double t, SobolevIndex k = {10.0});

struct Probe {
  TorusFunction f;
  double t = 0.0;
};

/// NonParabolic if every probe has |[P/dF/dw3]_ave| < tol, Parabolic if some
/// probe exceeds 10 tol, Inconclusive otherwise.  Throws DegenerateDispersion.
Resonance classify_resonance(const Equation& eq, const std::vector<Probe>& probes,
                             double tol = kResonanceTolerance);

enum class DataSet { Pk, PkPlus, PkMinus };
std::string_view data_set_name(DataSet s);

/// Membership of f in P_k(t), P_{+,k}(t), P_{-,k}(t).
std::set<DataSet> membership(const Equation& eq, const TorusFunction& f, double t, SobolevIndex k = {10.0},
                             double tol = kDeltaTolerance);

/// Random smooth trigonometric polynomials of degree <= max_degree, shifted to
/// be bounded below by `floor` when `sign` is Positive.
std::vector<TorusFunction> random_probes(std::size_t count, std::uint64_t seed, std::size_t grid_size,
                                         ProbeSign sign = ProbeSign::Any, int max_degree = 8);

// ---------------------------------------------------------------------------
// Catalog

struct CatalogEntry {
  std::string name;
  std::string title;
  std::string f_text;                                ///< definition in parser syntax
  std::map<std::string, std::string> coefficients;   ///< named coefficient definitions
  Resonance known;                                   ///< classification from the literature
  ProbeSign probe_sign;
  std::string delta_text;                            ///< closed form of delta at t = 0
  std::string p_text;                                ///< closed form of P
  bool total_derivative;                             ///< F is an exact x-derivative (mean conserved)

  Equation equation() const;
};

/// kdv, transition_kdv, k22, harry_dym, kdv_burgers, var_kdv.
const std::vector<CatalogEntry>& catalog();
/// Throws Error for unknown names.
const CatalogEntry& catalog_entry(std::string_view name);
std::optional<std::reference_wrapper<const CatalogEntry>> find_catalog_entry(std::string_view name);

/// Parses an equation definition:
///
///     # comment
///     name = my_equation          (optional)
///     a(x,t) = 1 + 0.5*sin(x)     (named coefficients, in dependency order)
///     F = a*w3 + w2 + 2*w0*w1
///
/// A bare expression without `F =` is accepted as F.  Throws ParseError.
Equation parse_equation(std::string_view text, std::string default_name = "custom");

/// Builds an equation from F text and named coefficient definitions.
Equation make_equation(std::string name, std::string_view f_text,
                       const std::map<std::string, std::string>& coefficients = {});

}  // namespace torus3
