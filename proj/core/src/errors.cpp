#include "torus3/errors.hpp"

#include <sstream>

namespace torus3 {

namespace {
std::string describe(const char* head, double value, double tol, const std::string& tail = {}) {
  std::ostringstream os;
  os.precision(6);
  os << head << value << " (tolerance " << tol << ")";
  if (!tail.empty()) os << ": " << tail;
  return os.str();
}
}  // namespace

NonZeroMean::NonZeroMean(double mean, double tolerance)
    : Error(describe("antiderivative of a function with nonzero mean ", mean, tolerance)), mean_(mean) {}

DomainError::DomainError(const std::string& what, std::size_t grid_index, double x)
    : Error([&] {
        std::ostringstream os;
        os << what << " at grid index " << grid_index << " (x = " << x << ")";
        return os.str();
      }()),
      grid_index_(grid_index),
      x_(x) {}

DegenerateDispersion::DegenerateDispersion(double delta, double tolerance, const std::string& context)
    : Error(describe("degenerate dispersion: inf |dF/dw3| = ", delta, tolerance, context)), delta_(delta) {}

ParseError::ParseError(const std::string& message, std::size_t position)
    : Error(message + " at position " + std::to_string(position)), position_(position) {}

ConfigError::ConfigError(std::string field, const std::string& message)
    : Error("config error in '" + field + "': " + message), field_(std::move(field)) {}

}  // namespace torus3
