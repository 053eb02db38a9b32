#pragma once

#include <cmath>
#include <limits>

#include "cinediff/types.hpp"

namespace cinediff {

/// Measurement-agreement weight. Infinity means hard replacement on the
/// sampled set; finite lambda blends toward the measurement.
struct DCConfig {
  double lambda = std::numeric_limits<double>::infinity();

  bool hard() const { return std::isinf(lambda); }
};

/// Cellwise data consistency on k-space:
///   unsampled cells pass through bitwise unchanged;
///   sampled cells become (y(w) + lambda * k(w)) / (1 + lambda),
///   or exactly y(w) when lambda is infinite (idempotent).
DynamicSeries data_consistency(const DynamicSeries& k, const DynamicSeries& y,
                               const SamplingMask& mask, double lambda);

}  // namespace cinediff
