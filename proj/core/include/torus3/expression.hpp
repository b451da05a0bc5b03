#pragma once

// Immutable scalar expression trees over the jet variables of F(w3, w2, w1, w0, x, t).

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>

namespace torus3 {

/// Arguments of F.  `X` is the explicit space variable, `T` is time.
enum class Var : std::uint8_t { W3, W2, W1, W0, X, T };

inline constexpr std::size_t kVarCount = 6;

std::string_view var_name(Var v);

enum class Op : std::uint8_t { Const, Var, Add, Sub, Mul, Div, Neg, PowInt, PowReal, Exp, Log, Sin, Cos };

/// Scalar values of every variable.
using Point = std::array<double, kVarCount>;

/// Columns of grid values; a null span entry is a constant given by `scalar`.
struct GridArgs {
  std::array<std::span<const double>, kVarCount> columns{};
  Point scalar{};
  std::size_t size = 0;

  double at(Var v, std::size_t j) const {
    const auto& c = columns[static_cast<std::size_t>(v)];
    return c.empty() ? scalar[static_cast<std::size_t>(v)] : c[j];
  }
};

class Expr {
 public:
  /// The constant 0.
  Expr();

  static Expr constant(double value);
  static Expr variable(Var v);

  Op op() const noexcept;
  /// True for a constant node; `value` receives it.
  bool is_constant(double* value = nullptr) const noexcept;
  bool depends_on(Var v) const;

  /// Exact partial derivative, with light algebraic simplification.
  Expr derivative(Var v) const;
  /// Replaces every occurrence of `v` by `with`.
  Expr substitute(Var v, const Expr& with) const;

  double evaluate(const Point& p) const;
  /// Vectorised evaluation over `args.size` points.  Throws DomainError; the
  /// reported x is `grid_spacing * index`.
  void evaluate(const GridArgs& args, std::span<double> out, double grid_spacing = 0.0) const;

  std::string to_string() const;
  /// Number of nodes (shared subtrees counted each time they appear).
  std::size_t size() const;

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);

  friend Expr pow(const Expr& base, int exponent);
  /// Real power; the base must stay positive where evaluated.
  friend Expr pow(const Expr& base, double exponent);
  friend Expr exp(const Expr& a);
  friend Expr log(const Expr& a);
  friend Expr sin(const Expr& a);
  friend Expr cos(const Expr& a);

  struct Node;

 private:
  explicit Expr(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;
};

Expr pow(const Expr& base, int exponent);
Expr pow(const Expr& base, double exponent);
Expr exp(const Expr& a);
Expr log(const Expr& a);
Expr sin(const Expr& a);
Expr cos(const Expr& a);

/// Parses an arithmetic expression.
///
/// Grammar: numbers, `+ - * / ^`, parentheses, the variables `w3 w2 w1 w0 x t`
/// (also `u` for w0), the functions `exp log sin cos sqrt`, and any name in
/// `named` (optionally written with an argument list such as `a(x,t)`, which
/// is ignored).  `^` with an integer literal exponent is an integer power,
/// otherwise a real power.
Expr parse_expression(std::string_view text, const std::map<std::string, Expr, std::less<>>& named = {});

}  // namespace torus3
