#pragma once

// Initial data shared by the test suites.

#include <cmath>

#include "wgnls/grid.hpp"

namespace fixture {

using wgnls::Complex;
using wgnls::Field;
using wgnls::GridPtr;

/// amp (1 + ymod cos y_1) exp(-|x|^2 / width^2).
inline Field gaussian(const GridPtr& g, double amp, double width, double ymod = 0.0) {
  return wgnls::sample_function(g, [=](auto x, auto y) {
    double r2 = 0.0;
    for (double v : x) r2 += v * v;
    const double m = y.empty() ? 1.0 : 1.0 + ymod * std::cos(y[0]);
    return Complex{amp * m * std::exp(-r2 / (width * width))};
  });
}

/// a exp(i (kx x_1 + ky y_1)).
inline Field mode(const GridPtr& g, Complex a, double kx, double ky) {
  return wgnls::sample_function(g, [=](auto x, auto y) {
    return a * std::polar(1.0, kx * x[0] + (y.empty() ? 0.0 : ky * y[0]));
  });
}

}  // namespace fixture
