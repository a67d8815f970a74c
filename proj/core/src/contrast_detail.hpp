#pragma once

#include "despeckle/ica.hpp"

#include <cmath>

namespace despeckle::detail {

inline double log_cosh(double x) {
  const double ax = std::abs(x);
  return ax + std::log1p(std::exp(-2.0 * ax)) - std::log(2.0);
}

/// G(u)
inline double contrast_value(const Contrast& c, double u) {
  if (c.kind == ContrastKind::LogCosh) return log_cosh(c.a1 * u) / c.a1;
  return -std::exp(-0.5 * u * u);
}

/// g(u) = G'(u)
inline double contrast_derivative(const Contrast& c, double u) {
  if (c.kind == ContrastKind::LogCosh) return std::tanh(c.a1 * u);
  return u * std::exp(-0.5 * u * u);
}

/// g'(u) = G''(u)
inline double contrast_second_derivative(const Contrast& c, double u) {
  if (c.kind == ContrastKind::LogCosh) {
    const double t = std::tanh(c.a1 * u);
    return c.a1 * (1.0 - t * t);
  }
  return (1.0 - u * u) * std::exp(-0.5 * u * u);
}

}  // namespace despeckle::detail
