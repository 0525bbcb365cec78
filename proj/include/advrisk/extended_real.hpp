#pragma once

#include <cmath>
#include <limits>

// Extended reals are plain doubles with IEEE infinities as the +/-inf sentinels.
namespace advrisk {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Product of a nonnegative mass and an extended-real integrand with 0 * inf := 0.
inline double mass_times(double mass, double value) {
  return mass == 0.0 ? 0.0 : mass * value;
}

// a - b for extended reals where a >= b is expected; inf - inf is reported as 0.
inline double ext_diff(double a, double b) {
  if (std::isinf(a) && std::isinf(b) && a == b) return 0.0;
  return a - b;
}

}  // namespace advrisk
