#pragma once

#include <span>

namespace torus3 {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Least-squares line through (x, y).  Needs at least two distinct x.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Slope of log y against log x.
double fit_log_slope(std::span<const double> x, std::span<const double> y);

}  // namespace torus3
