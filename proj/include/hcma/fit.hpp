#pragma once

#include <span>

namespace hcma {

/// Ordinary least squares y = slope * x + intercept.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double rms_residual = 0.0;
  int samples = 0;
};

LinearFit fit_line(std::span<const double> x, std::span<const double> y);

/// Least squares y = slope * x (no intercept); r2 is the uncentered fraction
/// of explained sum of squares.
LinearFit fit_proportional(std::span<const double> x, std::span<const double> y);

/// Order p in err ~ C h^p from a log-log fit.
LinearFit fit_order(std::span<const double> h, std::span<const double> err);

}  // namespace hcma
