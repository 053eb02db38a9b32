#pragma once

#include <vector>

#include "cinediff/error.hpp"

namespace cinediff {

/// Geometric noise-level ladder. Levels ascend: sigma(0) == sigma_min and
/// sigma(n_levels - 1) == sigma_max bit-exactly; interior levels follow
/// sigma_min * (sigma_max / sigma_min)^(i / (n_levels - 1)).
struct NoiseSchedule {
  double sigma_min = 0.01;
  double sigma_max = 1.0;
  int n_levels = 2;
  std::vector<double> sigmas;

  static NoiseSchedule geometric(double sigma_min, double sigma_max, int n_levels);

  double sigma(int level) const;
  int levels() const { return n_levels; }
};

}  // namespace cinediff
