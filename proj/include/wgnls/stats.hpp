#pragma once

// Small deterministic statistics helpers shared by the experiment labs.

#include <span>
#include <vector>

namespace wgnls {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  /// Standard error of the slope; 0 with fewer than three points.
  double slope_stderr = 0.0;
};

/// Ordinary least squares y = intercept + slope x. Needs two distinct x.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Median of a copy of v (mean of the middle pair for even sizes).
double median(std::vector<double> v);

/// Linear-interpolated quantile, q in [0, 1].
double quantile(std::vector<double> v, double q);

}  // namespace wgnls
