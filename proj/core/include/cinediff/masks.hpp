#pragma once

#include <cstdint>

#include "cinediff/types.hpp"

namespace cinediff {

enum class MaskFamily {
  /// Frame t acquires phase-encode lines with y mod R == t mod R, plus ACS.
  InterleavedUniform,
  /// Within each disjoint window of R frames every non-ACS line is assigned
  /// to exactly one random frame of the window, plus ACS in every frame.
  InterleavedRandom,
  /// ACS plus per-frame random phase-encode lines chosen to meet accel.
  Cartesian,
  /// Golden-angle spokes rasterized on the grid, rotating per frame.
  Radial,
};

const char* to_string(MaskFamily family);

struct MaskSpec {
  MaskFamily family = MaskFamily::InterleavedUniform;
  double accel = 4.0;
  /// Auto-calibration lines centered on DC; -1 selects default_acs_lines(ny).
  /// Ignored by the Radial family whose spokes are naturally center-dense.
  int acs_lines = -1;
  std::uint64_t seed = 0;
};

/// Default ACS width scales with matrix size: 8 lines at ny = 192.
int default_acs_lines(int ny);

/// Half-open row interval [lo, hi) of the ACS band centered on the DC row.
struct AcsBand {
  int lo = 0;
  int hi = 0;
  bool contains(int y) const { return y >= lo && y < hi; }
  int lines() const { return hi - lo; }
};

AcsBand acs_band(int ny, int acs_lines);

/// Build the acquisition pattern. Interleaved families require an integer
/// accel >= 2; Cartesian and Radial must realize accel within 10 percent or
/// the spec is rejected as infeasible.
SamplingMask make_mask(const MaskSpec& spec, int nx, int ny, int nt);

/// Gate a fully sampled k-space series through the mask, optionally adding
/// complex Gaussian noise (noise_sigma per real component) to the measured
/// cells. Unsampled cells are exactly zero.
DynamicSeries undersample(const DynamicSeries& kspace, const SamplingMask& mask,
                          double noise_sigma, std::uint64_t seed);

}  // namespace cinediff
