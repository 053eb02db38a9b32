#include "cinediff/dc.hpp"

#include <cmath>

namespace cinediff {

DynamicSeries data_consistency(const DynamicSeries& k, const DynamicSeries& y,
                               const SamplingMask& mask, double lambda) {
  validate_compatible(k, mask).require();
  validate_compatible(y, mask).require();
  if (k.domain != Domain::KSpace || y.domain != Domain::KSpace) {
    throw Error(ErrorKind::DomainMismatch, "data consistency operates on k-space series");
  }
  if (std::isnan(lambda) || lambda <= 0.0) {
    throw Error(ErrorKind::NonPositiveLambda, "lambda must be positive (or infinite)");
  }

  DynamicSeries out = k;
  if (std::isinf(lambda)) {
    for (std::size_t i = 0; i < out.data.size(); ++i) {
      if (mask.acquired[i]) out.data[i] = y.data[i];
    }
  } else {
    const double denom = 1.0 + lambda;
    for (std::size_t i = 0; i < out.data.size(); ++i) {
      if (mask.acquired[i]) out.data[i] = (y.data[i] + lambda * k.data[i]) / denom;
    }
  }
  return out;
}

}  // namespace cinediff
