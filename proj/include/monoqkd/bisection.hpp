#pragma once

#include <cmath>
#include <cstddef>

#include "monoqkd/errors.hpp"

namespace monoqkd {

struct BisectionResult {
  double root;
  std::size_t iterations;
};

/// Bisection for a continuous `g` with g(lower) and g(upper) of opposite sign
/// (or one of them zero). Stops when the bracket is narrower than
/// `tolerance` or after `max_iterations` halvings.
template <typename Function>
BisectionResult bisect(const Function& g, double lower, double upper, double tolerance = 1e-12,
                       std::size_t max_iterations = 200) {
  double g_lo = g(lower);
  const double g_hi = g(upper);
  if (g_lo == 0.0) return {lower, 0};
  if (g_hi == 0.0) return {upper, 0};
  if (std::signbit(g_lo) == std::signbit(g_hi)) {
    throw DomainError("bisection bracket does not straddle a sign change");
  }
  std::size_t it = 0;
  while (it < max_iterations && upper - lower > tolerance) {
    const double mid = lower + 0.5 * (upper - lower);
    const double g_mid = g(mid);
    ++it;
    if (g_mid == 0.0) return {mid, it};
    if (std::signbit(g_mid) == std::signbit(g_lo)) {
      lower = mid;
      g_lo = g_mid;
    } else {
      upper = mid;
    }
  }
  return {lower + 0.5 * (upper - lower), it};
}

}  // namespace monoqkd
