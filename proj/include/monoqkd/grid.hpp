#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "monoqkd/errors.hpp"

namespace monoqkd {

/// start, start + step, ... up to and including `end` (within 1e-9 steps),
/// computed as start + k*step to avoid accumulated drift.
inline std::vector<double> step_grid(double start, double end, double step) {
  if (!(step > 0.0) || !(end >= start)) throw DomainError("bad grid range");
  const auto count = static_cast<std::size_t>(std::floor((end - start) / step + 1e-9)) + 1;
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    out.push_back(std::min(end, start + static_cast<double>(k) * step));
  }
  return out;
}

}  // namespace monoqkd
