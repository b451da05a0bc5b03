#include "torus3/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

#include "fft.hpp"
#include "torus3/errors.hpp"

namespace torus3 {

namespace {

void check_grid_size(std::size_t n) {
  if (n < 4 || n % 2 != 0) {
    std::ostringstream os;
    os << "grid size must be even and >= 4, got " << n;
    throw Error(os.str());
  }
}

double bracket(int n) { return std::sqrt(1.0 + static_cast<double>(n) * n); }

// (in)^order as a complex factor, computed without pow() on the complex type.
Complex i_pow(int order) {
  switch (order % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

}  // namespace

std::size_t padded_size(std::size_t grid_size, Dealias dealias) {
  if (dealias == Dealias::Double) return 2 * grid_size;
  std::size_t m = (3 * grid_size + 1) / 2;
  return m + (m % 2);
}

TorusFunction::TorusFunction() : TorusFunction(kDefaultGridSize) {}

TorusFunction::TorusFunction(std::size_t grid_size)
    : grid_size_(grid_size), coeffs_(grid_size / 2 + 1, 0.0) {
  check_grid_size(grid_size);
}

TorusFunction::TorusFunction(std::size_t grid_size, std::vector<Complex> coeffs)
    : grid_size_(grid_size), coeffs_(std::move(coeffs)) {
  check_grid_size(grid_size);
  coeffs_.resize(grid_size / 2 + 1, 0.0);
  normalise();
}

void TorusFunction::normalise() {
  coeffs_[0].imag(0.0);
  coeffs_.back() = 0.0;
}

TorusFunction TorusFunction::from_grid(std::span<const double> values) {
  TorusFunction f(values.size());
  detail::forward_real(values, f.coeffs_);
  f.normalise();
  return f;
}

TorusFunction TorusFunction::from_function(std::size_t grid_size,
                                           const std::function<double(double)>& fn) {
  const auto xs = grid_points(grid_size);
  std::vector<double> v(grid_size);
  std::transform(xs.begin(), xs.end(), v.begin(), fn);
  return from_grid(v);
}

TorusFunction TorusFunction::constant(std::size_t grid_size, double c) {
  TorusFunction f(grid_size);
  f.coeffs_[0] = c;
  return f;
}

Complex TorusFunction::coeff(int n) const noexcept {
  const int a = std::abs(n);
  if (a >= static_cast<int>(coeffs_.size())) return 0.0;
  return n >= 0 ? coeffs_[static_cast<std::size_t>(a)] : std::conj(coeffs_[static_cast<std::size_t>(a)]);
}

std::vector<double> TorusFunction::grid_values() const { return sample(grid_size_); }

std::vector<double> TorusFunction::sample(std::size_t points) const {
  std::vector<double> out(points);
  detail::inverse_real(coeffs_, out);
  return out;
}

double TorusFunction::value_at(double x) const {
  double v = coeffs_[0].real();
  for (std::size_t n = 1; n < coeffs_.size(); ++n) {
    const Complex e(std::cos(static_cast<double>(n) * x), std::sin(static_cast<double>(n) * x));
    v += 2.0 * (coeffs_[n] * e).real();
  }
  return v;
}

TorusFunction TorusFunction::resampled(std::size_t grid_size) const {
  std::vector<Complex> c(coeffs_.begin(), coeffs_.end());
  return TorusFunction(grid_size, std::move(c));
}

bool TorusFunction::is_zero() const noexcept {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](const Complex& c) { return c == 0.0; });
}

TorusFunction& TorusFunction::operator+=(const TorusFunction& other) {
  if (other.grid_size_ != grid_size_) throw Error("grid size mismatch in +");
  for (std::size_t n = 0; n < coeffs_.size(); ++n) coeffs_[n] += other.coeffs_[n];
  return *this;
}

TorusFunction& TorusFunction::operator-=(const TorusFunction& other) {
  if (other.grid_size_ != grid_size_) throw Error("grid size mismatch in -");
  for (std::size_t n = 0; n < coeffs_.size(); ++n) coeffs_[n] -= other.coeffs_[n];
  return *this;
}

TorusFunction& TorusFunction::operator*=(double s) {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

std::vector<double> grid_points(std::size_t points) {
  std::vector<double> xs(points);
  for (std::size_t j = 0; j < points; ++j) xs[j] = kTwoPi * static_cast<double>(j) / static_cast<double>(points);
  return xs;
}

TorusFunction derivative(const TorusFunction& f, int order) {
  if (order < 0) throw Error("derivative order must be nonnegative");
  std::vector<Complex> c(f.coeffs().begin(), f.coeffs().end());
  const Complex unit = i_pow(order);
  for (std::size_t n = 0; n < c.size(); ++n) {
    c[n] *= unit * std::pow(static_cast<double>(n), order);
  }
  return TorusFunction(f.grid_size(), std::move(c));
}

double sobolev_norm(const TorusFunction& f, SobolevIndex s) {
  const auto c = f.coeffs();
  const double two_s = 2.0 * s.value();
  double sum = std::norm(c[0]);
  for (std::size_t n = 1; n < c.size(); ++n) {
    sum += 2.0 * std::pow(bracket(static_cast<int>(n)), two_s) * std::norm(c[n]);
  }
  return std::sqrt(sum);
}

double homogeneous_norm(const TorusFunction& f, SobolevIndex s) {
  const auto c = f.coeffs();
  const double two_s = 2.0 * s.value();
  double sum = two_s == 0.0 ? std::norm(c[0]) : 0.0;
  for (std::size_t n = 1; n < c.size(); ++n) {
    sum += 2.0 * std::pow(static_cast<double>(n), two_s) * std::norm(c[n]);
  }
  return std::sqrt(sum);
}

double average(const TorusFunction& f) { return f.coeffs()[0].real(); }

TorusFunction antiderivative_from_zero(const TorusFunction& f, double mean_tolerance) {
  const double mean = average(f);
  if (!(std::abs(mean) < mean_tolerance)) throw NonZeroMean(mean, mean_tolerance);
  const auto c = f.coeffs();
  std::vector<Complex> g(c.size(), 0.0);
  double at_zero = 0.0;
  for (std::size_t n = 1; n < c.size(); ++n) {
    g[n] = c[n] / Complex(0.0, static_cast<double>(n));
    at_zero += 2.0 * g[n].real();
  }
  g[0] = -at_zero;
  return TorusFunction(f.grid_size(), std::move(g));
}

TorusFunction pointwise(std::span<const TorusFunction* const> inputs,
                        const std::function<double(std::span<const double>)>& fn, Dealias dealias) {
  if (inputs.empty()) throw Error("pointwise: no inputs");
  const std::size_t n = inputs.front()->grid_size();
  for (const auto* in : inputs) {
    if (in->grid_size() != n) throw Error("pointwise: grid size mismatch");
  }
  const std::size_t m = padded_size(n, dealias);
  std::vector<std::vector<double>> vals;
  vals.reserve(inputs.size());
  for (const auto* in : inputs) vals.push_back(in->sample(m));
  std::vector<double> args(inputs.size());
  std::vector<double> out(m);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t k = 0; k < vals.size(); ++k) args[k] = vals[k][j];
    out[j] = fn(args);
  }
  return TorusFunction::from_grid(out).resampled(n);
}

TorusFunction pointwise(const TorusFunction& f, const std::function<double(double)>& fn, Dealias dealias) {
  const std::size_t m = padded_size(f.grid_size(), dealias);
  auto v = f.sample(m);
  for (auto& x : v) x = fn(x);
  return TorusFunction::from_grid(v).resampled(f.grid_size());
}

TorusFunction multiply(const TorusFunction& f, const TorusFunction& g, Dealias dealias) {
  if (f.grid_size() != g.grid_size()) throw Error("multiply: grid size mismatch");
  const std::size_t m = padded_size(f.grid_size(), dealias);
  auto a = f.sample(m);
  const auto b = g.sample(m);
  for (std::size_t j = 0; j < m; ++j) a[j] *= b[j];
  return TorusFunction::from_grid(a).resampled(f.grid_size());
}

TorusFunction mollify(const TorusFunction& f, double eps, double s) {
  if (!(eps > 0.0 && eps <= 1.0)) throw Error("mollify: eps must lie in (0, 1]");
  if (s < 0.0) throw Error("mollify: s must be nonnegative");
  std::vector<Complex> c(f.coeffs().begin(), f.coeffs().end());
  for (std::size_t n = 0; n < c.size(); ++n) c[n] *= std::exp(-eps * std::pow(bracket(static_cast<int>(n)), s));
  return TorusFunction(f.grid_size(), std::move(c));
}

TorusFunction heat_semigroup(const TorusFunction& f, double tau) {
  if (tau < 0.0) throw Error("heat_semigroup: tau must be nonnegative");
  std::vector<Complex> c(f.coeffs().begin(), f.coeffs().end());
  for (std::size_t n = 0; n < c.size(); ++n) {
    const double n2 = static_cast<double>(n) * static_cast<double>(n);
    c[n] *= std::exp(-tau * n2 * n2);
  }
  return TorusFunction(f.grid_size(), std::move(c));
}

double min_value(const TorusFunction& f) {
  const auto v = f.sample(kExtremaOversampling * f.grid_size());
  return *std::min_element(v.begin(), v.end());
}

double max_value(const TorusFunction& f) {
  const auto v = f.sample(kExtremaOversampling * f.grid_size());
  return *std::max_element(v.begin(), v.end());
}

double min_abs(const TorusFunction& f) {
  const auto v = f.sample(kExtremaOversampling * f.grid_size());
  double m = std::abs(v[0]);
  for (double x : v) m = std::min(m, std::abs(x));
  return m;
}

double sup_norm(const TorusFunction& f) {
  const auto v = f.sample(kExtremaOversampling * f.grid_size());
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double max_coeff_diff(const TorusFunction& f, const TorusFunction& g) {
  const int top = std::max(f.max_mode(), g.max_mode());
  double m = 0.0;
  for (int n = 0; n <= top + 1; ++n) m = std::max(m, std::abs(f.coeff(n) - g.coeff(n)));
  return m;
}

std::uint64_t fingerprint(const TorusFunction& f) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= p[i];
      h *= 1099511628211ULL;
    }
  };
  const std::uint64_t n = f.grid_size();
  mix(&n, sizeof n);
  for (const auto& c : f.coeffs()) {
    const double parts[2] = {c.real(), c.imag()};
    mix(parts, sizeof parts);
  }
  return h;
}

}  // namespace torus3
