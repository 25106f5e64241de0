#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace effilab {

/// 1-based rank k = ceil(count * p) of the left-continuous inverse
/// inf{y : F_count(y) >= p}, clamped to [1, count]. Products that land
/// within rounding of an integer are snapped to it, so 0.9 * 10 gives 9.
inline std::size_t quantile_rank(std::size_t count, double p) {
  const double t = p * static_cast<double>(count);
  const double nearest = std::nearbyint(t);
  double k = std::abs(t - nearest) <= 1e-9 * std::max(1.0, t) ? nearest : std::ceil(t);
  k = std::clamp(k, 1.0, static_cast<double>(count));
  return static_cast<std::size_t>(k);
}

}  // namespace effilab
