#pragma once

#include "cinediff/types.hpp"

namespace cinediff {

/// Acquisition model A = M . F . S : mask-gated centered FFT of the
/// sensitivity-weighted image. Single-coil scope: nc must be 1; the weights
/// may still be an arbitrary complex map.
struct ForwardModel {
  SamplingMask mask;
  CoilSensitivities sens;

  static ForwardModel single_coil(SamplingMask mask);
};

/// Image series -> masked k-space series (unsampled cells are exactly zero).
DynamicSeries apply_forward(const ForwardModel& model, const DynamicSeries& image);

/// Adjoint A^H = S^H . F^{-1} . M : masked k-space series -> image series.
/// Together with apply_forward this satisfies <A x, y> == <x, A^H y>.
DynamicSeries apply_adjoint(const ForwardModel& model, const DynamicSeries& kspace);

/// Zero-filled reconstruction A^H y, the conventional baseline.
DynamicSeries zero_filled(const ForwardModel& model, const DynamicSeries& kspace);

}  // namespace cinediff
