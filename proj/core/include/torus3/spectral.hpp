#pragma once

// Fourier calculus on the torus [0, 2pi).
//
// A TorusFunction is a real, 2pi-periodic function sampled on a uniform grid
// of N points (N even) and stored by its Fourier coefficients
//
//     f(x) = sum_{|n| < N/2} fhat(n) e^{inx},   fhat(n) = (1/2pi) int f e^{-inx} dx.
//
// Only n = 0..N/2 are stored; negative modes follow from Hermitian symmetry
// fhat(-n) = conj(fhat(n)).  The Nyquist coefficient n = N/2 is kept at zero so
// that every odd-order derivative stays real.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace torus3 {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Default offset used to realise "s+" indices as s + eta.
inline constexpr double kDefaultEta = 0.05;

/// Sobolev regularity index `base + plus_offset`.
struct SobolevIndex {
  double base = 0.0;
  double plus_offset = 0.0;

  constexpr SobolevIndex() = default;
  constexpr SobolevIndex(double b, double offset = 0.0) : base(b), plus_offset(offset) {}  // NOLINT

  constexpr double value() const noexcept { return base + plus_offset; }

  /// The index written `s+` : s + eta.
  static constexpr SobolevIndex plus(double s, double eta = kDefaultEta) { return {s, eta}; }
};

/// Padding used when a pointwise nonlinearity is evaluated in physical space.
enum class Dealias {
  ThreeHalves,  ///< exact for quadratic products
  Double,       ///< oversampling factor 2, for cubic and higher terms
};

/// Physical grid size used to evaluate nonlinear terms of a function on an N-point grid.
std::size_t padded_size(std::size_t grid_size, Dealias dealias);

class TorusFunction {
 public:
  /// Zero function on the default 256-point grid.
  TorusFunction();
  /// Zero function on a `grid_size`-point grid (even, >= 4).
  explicit TorusFunction(std::size_t grid_size);
  /// From coefficients n = 0..grid_size/2 (missing entries are zero).
  TorusFunction(std::size_t grid_size, std::vector<Complex> coeffs);

  static TorusFunction from_grid(std::span<const double> values);
  static TorusFunction from_function(std::size_t grid_size, const std::function<double(double)>& f);
  static TorusFunction constant(std::size_t grid_size, double c);

  std::size_t grid_size() const noexcept { return grid_size_; }
  /// Largest representable |n| (N/2 - 1; the Nyquist slot is always zero).
  int max_mode() const noexcept { return static_cast<int>(grid_size_ / 2) - 1; }

  /// fhat(n) for any integer n; zero outside the band.
  Complex coeff(int n) const noexcept;
  /// Stored coefficients n = 0..N/2.
  std::span<const Complex> coeffs() const noexcept { return coeffs_; }

  /// Values at x_j = 2 pi j / N.
  std::vector<double> grid_values() const;
  /// Values on an M-point uniform grid (band-limited interpolation or truncation).
  std::vector<double> sample(std::size_t points) const;
  /// Direct evaluation of the Fourier series at one point.
  double value_at(double x) const;

  /// The same function on a different grid (zero padding or truncation).
  TorusFunction resampled(std::size_t grid_size) const;

  bool is_zero() const noexcept;

  TorusFunction& operator+=(const TorusFunction& other);
  TorusFunction& operator-=(const TorusFunction& other);
  TorusFunction& operator*=(double s);

  friend TorusFunction operator+(TorusFunction a, const TorusFunction& b) { return a += b; }
  friend TorusFunction operator-(TorusFunction a, const TorusFunction& b) { return a -= b; }
  friend TorusFunction operator*(TorusFunction a, double s) { return a *= s; }
  friend TorusFunction operator*(double s, TorusFunction a) { return a *= s; }
  friend TorusFunction operator-(TorusFunction a) { return a *= -1.0; }

 private:
  void normalise();

  std::size_t grid_size_;
  std::vector<Complex> coeffs_;
};

/// Default grid: 256 points, modes |n| < 128.
inline constexpr std::size_t kDefaultGridSize = 256;

/// Grid points x_j = 2 pi j / points.
std::vector<double> grid_points(std::size_t points);

/// Coefficient-wise multiplication by (in)^order.
TorusFunction derivative(const TorusFunction& f, int order);

/// (sum_n <n>^{2s} |fhat(n)|^2)^{1/2} with <n> = (1 + n^2)^{1/2}.
double sobolev_norm(const TorusFunction& f, SobolevIndex s);
/// (sum_n |n|^{2s} |fhat(n)|^2)^{1/2}.
double homogeneous_norm(const TorusFunction& f, SobolevIndex s);

/// The average value [f]_ave = Re fhat(0).
double average(const TorusFunction& f);

/// Default tolerance on |average(f)| for antiderivative_from_zero.
inline constexpr double kMeanTolerance = 1e-10;

/// Periodic g with g(0) = 0 and g' = f.  Throws NonZeroMean when
/// |average(f)| >= mean_tolerance.
TorusFunction antiderivative_from_zero(const TorusFunction& f, double mean_tolerance = kMeanTolerance);

/// Pseudospectral product on a zero-padded grid, truncated back to the grid of `f`.
TorusFunction multiply(const TorusFunction& f, const TorusFunction& g, Dealias dealias = Dealias::ThreeHalves);

/// Mollifier J_{eps,s}: multiplier e^{-eps <n>^s}.
TorusFunction mollify(const TorusFunction& f, double eps, double s);

/// Fourth-order heat semigroup e^{-tau d^4}: multiplier e^{-tau n^4}.
TorusFunction heat_semigroup(const TorusFunction& f, double tau);

/// Applies `fn` pointwise on the padded grid of the inputs and returns the
/// truncated result.  All inputs must share one grid size.
TorusFunction pointwise(std::span<const TorusFunction* const> inputs,
                        const std::function<double(std::span<const double>)>& fn,
                        Dealias dealias = Dealias::ThreeHalves);
TorusFunction pointwise(const TorusFunction& f, const std::function<double(double)>& fn,
                        Dealias dealias = Dealias::ThreeHalves);

/// Oversampling factor used to approximate infima and suprema over x.
inline constexpr std::size_t kExtremaOversampling = 4;

double min_value(const TorusFunction& f);
double max_value(const TorusFunction& f);
/// min_x |f(x)| on the oversampled grid.
double min_abs(const TorusFunction& f);
/// max_x |f(x)| on the oversampled grid.
double sup_norm(const TorusFunction& f);

/// Largest |fhat(n) - ghat(n)| over all n (grids may differ).
double max_coeff_diff(const TorusFunction& f, const TorusFunction& g);

/// FNV-1a hash of grid size and coefficient bytes.
std::uint64_t fingerprint(const TorusFunction& f);

}  // namespace torus3
