#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace torus3 {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The antiderivative of a function with nonzero mean is not periodic.
class NonZeroMean : public Error {
 public:
  NonZeroMean(double mean, double tolerance);
  double mean() const noexcept { return mean_; }

 private:
  double mean_;
};

/// Pointwise evaluation left the domain of an expression node
/// (division by zero, log or real power of a nonpositive value, overflow).
class DomainError : public Error {
 public:
  DomainError(const std::string& what, std::size_t grid_index, double x);
  std::size_t grid_index() const noexcept { return grid_index_; }
  double x() const noexcept { return x_; }

 private:
  std::size_t grid_index_;
  double x_;
};

/// inf_x |dF/dw3| fell to (or below) the dispersion tolerance.
class DegenerateDispersion : public Error {
 public:
  DegenerateDispersion(double delta, double tolerance, const std::string& context = {});
  double delta() const noexcept { return delta_; }

 private:
  double delta_;
};

/// Malformed expression text.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t position);
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// Invalid run configuration; `field()` is a dotted path such as `solve.dt`.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message);
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace torus3
