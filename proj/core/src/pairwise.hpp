#pragma once

#include <cstddef>
#include <span>

namespace spinchain::detail {

// Cascade (pairwise) summation: O(eps log n) error growth instead of
// O(eps n), with a fixed reduction tree so results do not depend on worker
// count.
inline double pairwise_sum(std::span<const double> values) {
  constexpr std::size_t kBase = 32;
  if (values.size() <= kBase) {
    double acc = 0.0;
    for (double v : values) acc += v;
    return acc;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

}  // namespace spinchain::detail
