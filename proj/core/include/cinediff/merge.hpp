#pragma once

#include <span>
#include <vector>

#include "cinediff/masks.hpp"
#include "cinediff/types.hpp"

namespace cinediff {

enum class OffsetMode { Uniform, Random };
enum class WindowMode { SlidingCircular, Disjoint };

/// How a window of undersampled frames becomes one training frame.
enum class MergeScheme {
  /// Complementary interleaved lines fill the grid; the window's center
  /// frame then overwrites the ACS band so the low frequencies describe one
  /// time point instead of a temporal mean.
  TimeInterleaved,
  /// Plain per-cell mean over the frames that acquired the cell. Baseline
  /// scheme; motion in the window blurs into the merged frame everywhere.
  TemporalAverage,
};

const char* to_string(MergeScheme scheme);

/// Time-interleaved acquisition and merge parameters.
struct InterleavedScheme {
  int accel = 4;
  /// -1 selects default_acs_lines(ny).
  int acs_lines = -1;
  OffsetMode offsets = OffsetMode::Uniform;
  WindowMode windows = WindowMode::SlidingCircular;
  std::uint64_t seed = 0;

  MaskSpec mask_spec() const;
};

/// Merge one window of undersampled k-space frames into a full grid.
///
/// Inside the ACS band a cell takes the mean of all frames that acquired it;
/// outside the band exactly one frame must have acquired each cell and its
/// value is copied through. Raises IncompleteCoverage for an unacquired cell
/// and AmbiguousContributor when two frames claim a cell outside the band.
std::vector<Complex> merge_window(const DynamicSeries& kspace, const SamplingMask& mask,
                                  std::span<const int> frame_ids, const AcsBand& band);

/// Per-cell mean over the frames in the window that acquired the cell;
/// cells nobody acquired stay zero.
std::vector<Complex> merge_by_averaging(const DynamicSeries& kspace, const SamplingMask& mask,
                                        std::span<const int> frame_ids);

struct TrainingEntry {
  /// First frame of the window and the frame whose ACS band the merged
  /// sample keeps (the window center).
  int window_start = 0;
  int center_frame = 0;
};

/// Merged k-space frames ready for prior training.
struct TrainingSet {
  int nx = 0;
  int ny = 0;
  std::vector<std::vector<Complex>> samples;
  std::vector<TrainingEntry> entries;

  /// Pack samples as a k-space series with nt == samples.size().
  DynamicSeries as_series() const;
};

/// Slide (or tile, for Disjoint windows) the merge over the series.
/// SlidingCircular yields nt samples, one centered on every frame, with
/// wraparound at the ends; Disjoint yields floor(nt / accel) samples.
TrainingSet build_training_set(const DynamicSeries& kspace, const SamplingMask& mask,
                               const InterleavedScheme& scheme,
                               MergeScheme merge = MergeScheme::TimeInterleaved);

/// The frame indices of the window centered on frame t (TimeInterleaved
/// placement: entry floor(R/2) is t itself, neighbours wrap circularly).
std::vector<int> sliding_window_ids(int t, int R, int nt);

}  // namespace cinediff
