#pragma once

#include <cmath>
#include <numbers>

namespace rlopt {

/// Standard normal density.
inline double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

/// Standard normal CDF, Phi(z) = erfc(-z / sqrt 2) / 2. erfc keeps full
/// relative precision in the lower tail where 1 + erf would cancel.
inline double normal_cdf(double z) {
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

}  // namespace rlopt
