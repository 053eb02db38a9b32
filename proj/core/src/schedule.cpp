#include "cinediff/schedule.hpp"

#include <cmath>
#include <sstream>

namespace cinediff {

NoiseSchedule NoiseSchedule::geometric(double sigma_min, double sigma_max, int n_levels) {
  if (!(sigma_min > 0.0) || !std::isfinite(sigma_min)) {
    throw Error(ErrorKind::NonPositiveSigma, "sigma_min must be finite and positive");
  }
  if (!(sigma_max > 0.0) || !std::isfinite(sigma_max)) {
    throw Error(ErrorKind::NonPositiveSigma, "sigma_max must be finite and positive");
  }
  if (!(sigma_max > sigma_min)) {
    std::ostringstream msg;
    msg << "sigma_max (" << sigma_max << ") must exceed sigma_min (" << sigma_min << ")";
    throw Error(ErrorKind::ScheduleOrderViolation, msg.str());
  }
  if (n_levels < 2) {
    throw Error(ErrorKind::InvalidArgument, "schedule needs at least 2 levels");
  }

  NoiseSchedule s;
  s.sigma_min = sigma_min;
  s.sigma_max = sigma_max;
  s.n_levels = n_levels;
  s.sigmas.resize(n_levels);
  const double log_ratio = std::log(sigma_max / sigma_min);
  for (int i = 0; i < n_levels; ++i) {
    const double frac = static_cast<double>(i) / static_cast<double>(n_levels - 1);
    s.sigmas[i] = sigma_min * std::exp(frac * log_ratio);
  }
  // Endpoints are contractual; overwrite any rounding from exp/log.
  s.sigmas.front() = sigma_min;
  s.sigmas.back() = sigma_max;
  return s;
}

double NoiseSchedule::sigma(int level) const {
  if (level < 0 || level >= n_levels) {
    std::ostringstream msg;
    msg << "level " << level << " outside [0, " << n_levels << ")";
    throw Error(ErrorKind::InvalidArgument, msg.str());
  }
  return sigmas[static_cast<std::size_t>(level)];
}

}  // namespace cinediff
