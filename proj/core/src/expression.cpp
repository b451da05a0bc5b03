#include "torus3/expression.hpp"

#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "torus3/errors.hpp"

namespace torus3 {

struct Expr::Node {
  Op op = Op::Const;
  double value = 0.0;  // Const value, or PowReal exponent
  int exponent = 0;    // PowInt exponent
  Var var = Var::W0;
  std::shared_ptr<const Node> a;
  std::shared_ptr<const Node> b;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr) {
  auto n = std::make_shared<Expr::Node>();
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

NodePtr make_const(double v) {
  auto n = std::make_shared<Expr::Node>();
  n->op = Op::Const;
  n->value = v;
  return n;
}

bool is_const(const NodePtr& n, double v) { return n->op == Op::Const && n->value == v; }

double ipow(double x, int k) {
  if (k < 0) return 1.0 / ipow(x, -k);
  double r = 1.0;
  while (k) {
    if (k & 1) r *= x;
    x *= x;
    k >>= 1;
  }
  return r;
}

double scalar_eval(const Expr::Node& n, const Point& p) {
  switch (n.op) {
    case Op::Const: return n.value;
    case Op::Var: return p[static_cast<std::size_t>(n.var)];
    case Op::Add: return scalar_eval(*n.a, p) + scalar_eval(*n.b, p);
    case Op::Sub: return scalar_eval(*n.a, p) - scalar_eval(*n.b, p);
    case Op::Mul: return scalar_eval(*n.a, p) * scalar_eval(*n.b, p);
    case Op::Div: return scalar_eval(*n.a, p) / scalar_eval(*n.b, p);
    case Op::Neg: return -scalar_eval(*n.a, p);
    case Op::PowInt: return ipow(scalar_eval(*n.a, p), n.exponent);
    case Op::PowReal: return std::pow(scalar_eval(*n.a, p), n.value);
    case Op::Exp: return std::exp(scalar_eval(*n.a, p));
    case Op::Log: return std::log(scalar_eval(*n.a, p));
    case Op::Sin: return std::sin(scalar_eval(*n.a, p));
    case Op::Cos: return std::cos(scalar_eval(*n.a, p));
  }
  return 0.0;
}

void grid_eval(const Expr::Node& n, const GridArgs& args, std::span<double> out, double h) {
  const std::size_t m = args.size;
  auto fail = [h](const char* what, std::size_t j) { throw DomainError(what, j, h * static_cast<double>(j)); };
  switch (n.op) {
    case Op::Const:
      std::fill(out.begin(), out.end(), n.value);
      return;
    case Op::Var:
      for (std::size_t j = 0; j < m; ++j) out[j] = args.at(n.var, j);
      return;
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div: {
      grid_eval(*n.a, args, out, h);
      std::vector<double> rhs(m);
      grid_eval(*n.b, args, rhs, h);
      if (n.op == Op::Add) {
        for (std::size_t j = 0; j < m; ++j) out[j] += rhs[j];
      } else if (n.op == Op::Sub) {
        for (std::size_t j = 0; j < m; ++j) out[j] -= rhs[j];
      } else if (n.op == Op::Mul) {
        for (std::size_t j = 0; j < m; ++j) out[j] *= rhs[j];
      } else {
        for (std::size_t j = 0; j < m; ++j) {
          if (std::abs(rhs[j]) < std::numeric_limits<double>::min()) fail("division by zero", j);
          out[j] /= rhs[j];
        }
      }
      return;
    }
    default: break;
  }
  grid_eval(*n.a, args, out, h);
  switch (n.op) {
    case Op::Neg:
      for (auto& v : out) v = -v;
      break;
    case Op::PowInt:
      for (std::size_t j = 0; j < m; ++j) {
        if (n.exponent < 0 && std::abs(out[j]) < std::numeric_limits<double>::min()) fail("negative power of zero", j);
        out[j] = ipow(out[j], n.exponent);
      }
      break;
    case Op::PowReal:
      for (std::size_t j = 0; j < m; ++j) {
        if (!(out[j] > 0.0)) fail("real power of a nonpositive value", j);
        out[j] = std::pow(out[j], n.value);
      }
      break;
    case Op::Exp:
      for (auto& v : out) v = std::exp(v);
      break;
    case Op::Log:
      for (std::size_t j = 0; j < m; ++j) {
        if (!(out[j] > 0.0)) fail("log of a nonpositive value", j);
        out[j] = std::log(out[j]);
      }
      break;
    case Op::Sin:
      for (auto& v : out) v = std::sin(v);
      break;
    case Op::Cos:
      for (auto& v : out) v = std::cos(v);
      break;
    default: break;
  }
}

int precedence(Op op) {
  switch (op) {
    case Op::Add:
    case Op::Sub: return 1;
    case Op::Mul:
    case Op::Div: return 2;
    case Op::Neg: return 3;
    case Op::PowInt:
    case Op::PowReal: return 4;
    default: return 5;
  }
}

void print(const Expr::Node& n, std::ostream& os, int parent_prec) {
  const int prec = precedence(n.op);
  const bool paren = prec < parent_prec;
  if (paren) os << '(';
  switch (n.op) {
    case Op::Const:
      if (n.value < 0.0 && parent_prec > 1) {
        os << '(' << n.value << ')';
      } else {
        os << n.value;
      }
      break;
    case Op::Var: os << var_name(n.var); break;
    case Op::Add: print(*n.a, os, 1); os << " + "; print(*n.b, os, 1); break;
    case Op::Sub: print(*n.a, os, 1); os << " - "; print(*n.b, os, 2); break;
    case Op::Mul: print(*n.a, os, 2); os << '*'; print(*n.b, os, 3); break;
    case Op::Div: print(*n.a, os, 2); os << '/'; print(*n.b, os, 3); break;
    case Op::Neg: os << '-'; print(*n.a, os, 3); break;
    case Op::PowInt: print(*n.a, os, 5); os << '^' << n.exponent; break;
    case Op::PowReal: print(*n.a, os, 5); os << '^' << '(' << n.value << ')'; break;
    case Op::Exp: os << "exp("; print(*n.a, os, 0); os << ')'; break;
    case Op::Log: os << "log("; print(*n.a, os, 0); os << ')'; break;
    case Op::Sin: os << "sin("; print(*n.a, os, 0); os << ')'; break;
    case Op::Cos: os << "cos("; print(*n.a, os, 0); os << ')'; break;
  }
  if (paren) os << ')';
}

}  // namespace

std::string_view var_name(Var v) {
  switch (v) {
    case Var::W3: return "w3";
    case Var::W2: return "w2";
    case Var::W1: return "w1";
    case Var::W0: return "w0";
    case Var::X: return "x";
    case Var::T: return "t";
  }
  return "?";
}

Expr::Expr() : node_(make_const(0.0)) {}
Expr::Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Expr Expr::constant(double value) { return Expr(make_const(value)); }

Expr Expr::variable(Var v) {
  auto n = std::make_shared<Node>();
  n->op = Op::Var;
  n->var = v;
  return Expr(n);
}

Op Expr::op() const noexcept { return node_->op; }

bool Expr::is_constant(double* value) const noexcept {
  if (node_->op != Op::Const) return false;
  if (value) *value = node_->value;
  return true;
}

bool Expr::depends_on(Var v) const {
  const Node& n = *node_;
  if (n.op == Op::Const) return false;
  if (n.op == Op::Var) return n.var == v;
  if (n.a && Expr(n.a).depends_on(v)) return true;
  return n.b && Expr(n.b).depends_on(v);
}

Expr operator+(const Expr& a, const Expr& b) {
  double x, y;
  if (a.is_constant(&x) && b.is_constant(&y)) return Expr::constant(x + y);
  if (is_const(a.node_, 0.0)) return b;
  if (is_const(b.node_, 0.0)) return a;
  return Expr(make(Op::Add, a.node_, b.node_));
}

Expr operator-(const Expr& a, const Expr& b) {
  double x, y;
  if (a.is_constant(&x) && b.is_constant(&y)) return Expr::constant(x - y);
  if (is_const(b.node_, 0.0)) return a;
  if (is_const(a.node_, 0.0)) return -b;
  return Expr(make(Op::Sub, a.node_, b.node_));
}

Expr operator*(const Expr& a, const Expr& b) {
  double x, y;
  if (a.is_constant(&x) && b.is_constant(&y)) return Expr::constant(x * y);
  if (is_const(a.node_, 0.0) || is_const(b.node_, 0.0)) return Expr::constant(0.0);
  if (is_const(a.node_, 1.0)) return b;
  if (is_const(b.node_, 1.0)) return a;
  if (is_const(a.node_, -1.0)) return -b;
  if (is_const(b.node_, -1.0)) return -a;
  return Expr(make(Op::Mul, a.node_, b.node_));
}

Expr operator/(const Expr& a, const Expr& b) {
  double x, y;
  if (a.is_constant(&x) && b.is_constant(&y) && y != 0.0) return Expr::constant(x / y);
  if (is_const(a.node_, 0.0)) return Expr::constant(0.0);
  if (is_const(b.node_, 1.0)) return a;
  return Expr(make(Op::Div, a.node_, b.node_));
}

Expr operator-(const Expr& a) {
  double x;
  if (a.is_constant(&x)) return Expr::constant(-x);
  if (a.node_->op == Op::Neg) return Expr(a.node_->a);
  return Expr(make(Op::Neg, a.node_));
}

Expr pow(const Expr& base, int exponent) {
  double x;
  if (exponent == 0) return Expr::constant(1.0);
  if (exponent == 1) return base;
  if (base.is_constant(&x)) return Expr::constant(ipow(x, exponent));
  auto n = std::make_shared<Expr::Node>();
  n->op = Op::PowInt;
  n->exponent = exponent;
  n->a = base.node_;
  return Expr(n);
}

Expr pow(const Expr& base, double exponent) {
  double x;
  if (exponent == 0.0) return Expr::constant(1.0);
  if (exponent == 1.0) return base;
  if (base.is_constant(&x)) return Expr::constant(std::pow(x, exponent));
  auto n = std::make_shared<Expr::Node>();
  n->op = Op::PowReal;
  n->value = exponent;
  n->a = base.node_;
  return Expr(n);
}

Expr exp(const Expr& a) {
  double x;
  if (a.is_constant(&x)) return Expr::constant(std::exp(x));
  return Expr(make(Op::Exp, a.node_));
}

Expr log(const Expr& a) {
  double x;
  if (a.is_constant(&x) && x > 0.0) return Expr::constant(std::log(x));
  return Expr(make(Op::Log, a.node_));
}

Expr sin(const Expr& a) {
  double x;
  if (a.is_constant(&x)) return Expr::constant(std::sin(x));
  return Expr(make(Op::Sin, a.node_));
}

Expr cos(const Expr& a) {
  double x;
  if (a.is_constant(&x)) return Expr::constant(std::cos(x));
  return Expr(make(Op::Cos, a.node_));
}

Expr Expr::derivative(Var v) const {
  const Node& n = *node_;
  switch (n.op) {
    case Op::Const: return constant(0.0);
    case Op::Var: return constant(n.var == v ? 1.0 : 0.0);
    default: break;
  }
  const Expr a(n.a);
  const Expr da = a.derivative(v);
  switch (n.op) {
    case Op::Add: return da + Expr(n.b).derivative(v);
    case Op::Sub: return da - Expr(n.b).derivative(v);
    case Op::Mul: {
      const Expr b(n.b);
      return da * b + a * b.derivative(v);
    }
    case Op::Div: {
      const Expr b(n.b);
      return da / b - a * b.derivative(v) / pow(b, 2);
    }
    case Op::Neg: return -da;
    case Op::PowInt: return constant(n.exponent) * pow(a, n.exponent - 1) * da;
    case Op::PowReal: return constant(n.value) * pow(a, n.value - 1.0) * da;
    case Op::Exp: return *this * da;
    case Op::Log: return da / a;
    case Op::Sin: return cos(a) * da;
    case Op::Cos: return -(sin(a) * da);
    default: return constant(0.0);
  }
}

Expr Expr::substitute(Var v, const Expr& with) const {
  const Node& n = *node_;
  switch (n.op) {
    case Op::Const: return *this;
    case Op::Var: return n.var == v ? with : *this;
    default: break;
  }
  const Expr a = Expr(n.a).substitute(v, with);
  switch (n.op) {
    case Op::Add: return a + Expr(n.b).substitute(v, with);
    case Op::Sub: return a - Expr(n.b).substitute(v, with);
    case Op::Mul: return a * Expr(n.b).substitute(v, with);
    case Op::Div: return a / Expr(n.b).substitute(v, with);
    case Op::Neg: return -a;
    case Op::PowInt: return pow(a, n.exponent);
    case Op::PowReal: return pow(a, n.value);
    case Op::Exp: return exp(a);
    case Op::Log: return log(a);
    case Op::Sin: return sin(a);
    case Op::Cos: return cos(a);
    default: return *this;
  }
}

double Expr::evaluate(const Point& p) const { return scalar_eval(*node_, p); }

void Expr::evaluate(const GridArgs& args, std::span<double> out, double grid_spacing) const {
  if (out.size() != args.size) throw Error("Expr::evaluate: output size mismatch");
  grid_eval(*node_, args, out, grid_spacing);
  for (std::size_t j = 0; j < out.size(); ++j) {
    if (!std::isfinite(out[j])) {
      throw DomainError("non-finite value", j, grid_spacing * static_cast<double>(j));
    }
  }
}

std::string Expr::to_string() const {
  std::ostringstream os;
  os.precision(12);
  print(*node_, os, 0);
  return os.str();
}

std::size_t Expr::size() const {
  std::size_t s = 1;
  if (node_->a) s += Expr(node_->a).size();
  if (node_->b) s += Expr(node_->b).size();
  return s;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

class Parser {
 public:
  Parser(std::string_view text, const std::map<std::string, Expr, std::less<>>& named)
      : text_(text), named_(named) {}

  Expr parse() {
    Expr e = expression();
    skip_space();
    if (pos_ != text_.size()) throw ParseError("unexpected '" + std::string(1, text_[pos_]) + "'", pos_);
    return e;
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) throw ParseError(std::string("expected '") + c + "'", pos_);
  }

  Expr expression() {
    Expr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = lhs + term();
      } else if (accept('-')) {
        lhs = lhs - term();
      } else {
        return lhs;
      }
    }
  }

  Expr term() {
    Expr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = lhs * unary();
      } else if (accept('/')) {
        lhs = lhs / unary();
      } else {
        return lhs;
      }
    }
  }

  Expr unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (!accept('^')) return base;
    Expr ex = unary();
    double e;
    if (ex.is_constant(&e)) {
      if (e == std::round(e) && std::abs(e) < 1e6) return pow(base, static_cast<int>(e));
      return pow(base, e);
    }
    return exp(ex * log(base));
  }

  Expr primary() {
    skip_space();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of expression", pos_);
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    if (accept('(')) {
      Expr e = expression();
      expect(')');
      return e;
    }
    throw ParseError(std::string("unexpected '") + c + "'", pos_);
  }

  Expr number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
      ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
      if (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) {
        pos_ = p;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      }
    }
    const std::string s(text_.substr(start, pos_ - start));
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw ParseError("malformed number '" + s + "'", start);
      return Expr::constant(v);
    } catch (const std::logic_error&) {
      throw ParseError("malformed number '" + s + "'", start);
    }
  }

  std::string name() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  Expr identifier() {
    const std::size_t start = pos_;
    const std::string id = name();
    if (id == "exp" || id == "log" || id == "sin" || id == "cos" || id == "sqrt") {
      expect('(');
      Expr arg = expression();
      expect(')');
      if (id == "exp") return exp(arg);
      if (id == "log") return log(arg);
      if (id == "sin") return sin(arg);
      if (id == "cos") return cos(arg);
      return pow(arg, 0.5);
    }
    if (id == "w3") return Expr::variable(Var::W3);
    if (id == "w2") return Expr::variable(Var::W2);
    if (id == "w1") return Expr::variable(Var::W1);
    if (id == "w0" || id == "u") return Expr::variable(Var::W0);
    if (id == "x") return Expr::variable(Var::X);
    if (id == "t") return Expr::variable(Var::T);
    if (id == "pi") return Expr::constant(kPiValue);
    auto it = named_.find(id);
    if (it == named_.end()) throw ParseError("unknown identifier '" + id + "'", start);
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == '(') {
      // Optional argument list such as a(x,t); only x and t are allowed.
      ++pos_;
      for (;;) {
        skip_space();
        const std::size_t at = pos_;
        const std::string arg = name();
        if (arg != "x" && arg != "t") throw ParseError("coefficient arguments must be x or t", at);
        if (accept(')')) break;
        expect(',');
      }
    }
    return it->second;
  }

  static constexpr double kPiValue = 3.14159265358979323846;

  std::string_view text_;
  const std::map<std::string, Expr, std::less<>>& named_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expression(std::string_view text, const std::map<std::string, Expr, std::less<>>& named) {
  return Parser(text, named).parse();
}

}  // namespace torus3
