#pragma once

#include <cmath>
#include <span>

#include "cinediff/schedule.hpp"
#include "cinediff/types.hpp"
#include "conv_net.hpp"

namespace cinediff::detail {

/// Network input construction shared by evaluation and training: channels
/// are [Re(x), Im(x)] scaled by 1/sqrt(1+sigma^2) plus a constant
/// log-sigma embedding normalized over the schedule range.
inline void build_score_input(std::span<const Complex> x, double sigma,
                              const NoiseSchedule& schedule, ConvNet<float>::Matrix& input) {
  const auto n = static_cast<Eigen::Index>(x.size());
  const float gain = static_cast<float>(1.0 / std::sqrt(1.0 + sigma * sigma));
  const double lo = std::log(schedule.sigma_min);
  const double hi = std::log(schedule.sigma_max);
  const float embed = static_cast<float>(2.0 * (std::log(sigma) - lo) / (hi - lo) - 1.0);
  input.resize(3, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    input(0, i) = gain * static_cast<float>(x[static_cast<std::size_t>(i)].real());
    input(1, i) = gain * static_cast<float>(x[static_cast<std::size_t>(i)].imag());
    input(2, i) = embed;
  }
}

}  // namespace cinediff::detail
