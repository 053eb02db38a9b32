#include "cinediff/merge.hpp"

#include <algorithm>
#include <sstream>

namespace cinediff {

namespace {

// Shape-only compatibility: the merge contract promises to read nothing but
// measured cells, so unmeasured garbage (even NaN) must stay invisible.
void check_shapes(const DynamicSeries& kspace, const SamplingMask& mask) {
  if (kspace.nx != mask.nx || kspace.ny != mask.ny || kspace.nt != mask.nt) {
    throw Error(ErrorKind::ShapeMismatch, "series and mask shapes differ");
  }
}

void check_window(const DynamicSeries& kspace, const SamplingMask& mask,
                  std::span<const int> frame_ids) {
  check_shapes(kspace, mask);
  if (kspace.domain != Domain::KSpace) {
    throw Error(ErrorKind::DomainMismatch, "merging operates on k-space series");
  }
  if (frame_ids.empty()) {
    throw Error(ErrorKind::InfeasibleWindow, "window holds no frames");
  }
  for (int t : frame_ids) {
    if (t < 0 || t >= kspace.nt) {
      std::ostringstream msg;
      msg << "window frame " << t << " outside [0, " << kspace.nt << ")";
      throw Error(ErrorKind::InfeasibleWindow, msg.str());
    }
  }
}

}  // namespace

const char* to_string(MergeScheme scheme) {
  return scheme == MergeScheme::TimeInterleaved ? "time-interleaved" : "temporal-average";
}

MaskSpec InterleavedScheme::mask_spec() const {
  MaskSpec spec;
  spec.family = offsets == OffsetMode::Uniform ? MaskFamily::InterleavedUniform
                                               : MaskFamily::InterleavedRandom;
  spec.accel = static_cast<double>(accel);
  spec.acs_lines = acs_lines;
  spec.seed = seed;
  return spec;
}

std::vector<Complex> merge_window(const DynamicSeries& kspace, const SamplingMask& mask,
                                  std::span<const int> frame_ids, const AcsBand& band) {
  check_window(kspace, mask, frame_ids);
  if (band.lo < 0 || band.hi > kspace.ny || band.lo > band.hi) {
    throw Error(ErrorKind::InvalidSpec, "ACS band outside the phase-encode range");
  }

  const int nx = kspace.nx;
  const int ny = kspace.ny;
  std::vector<Complex> merged(static_cast<std::size_t>(nx) * ny, Complex(0.0, 0.0));

  for (int y = 0; y < ny; ++y) {
    const bool in_band = band.contains(y);
    for (int x = 0; x < nx; ++x) {
      Complex sum(0.0, 0.0);
      int contributors = 0;
      for (int t : frame_ids) {
        if (mask.at(t, y, x)) {
          sum += kspace.at(t, y, x);
          ++contributors;
        }
      }
      if (contributors == 0) {
        std::ostringstream msg;
        msg << "no frame in the window acquired cell (y=" << y << ", x=" << x << ")";
        throw Error(ErrorKind::IncompleteCoverage, msg.str());
      }
      if (!in_band && contributors > 1) {
        std::ostringstream msg;
        msg << contributors << " frames acquired cell (y=" << y << ", x=" << x
            << ") outside the ACS band";
        throw Error(ErrorKind::AmbiguousContributor, msg.str());
      }
      merged[static_cast<std::size_t>(y) * nx + x] =
          sum / static_cast<double>(contributors);
    }
  }
  return merged;
}

std::vector<Complex> merge_by_averaging(const DynamicSeries& kspace, const SamplingMask& mask,
                                        std::span<const int> frame_ids) {
  check_window(kspace, mask, frame_ids);
  const int nx = kspace.nx;
  const int ny = kspace.ny;
  std::vector<Complex> merged(static_cast<std::size_t>(nx) * ny, Complex(0.0, 0.0));
  for (int y = 0; y < ny; ++y) {
    for (int x = 0; x < nx; ++x) {
      Complex sum(0.0, 0.0);
      int contributors = 0;
      for (int t : frame_ids) {
        if (mask.at(t, y, x)) {
          sum += kspace.at(t, y, x);
          ++contributors;
        }
      }
      if (contributors > 0) {
        merged[static_cast<std::size_t>(y) * nx + x] =
            sum / static_cast<double>(contributors);
      }
    }
  }
  return merged;
}

std::vector<int> sliding_window_ids(int t, int R, int nt) {
  std::vector<int> ids(static_cast<std::size_t>(R));
  const int offset = R / 2;
  for (int j = 0; j < R; ++j) {
    ids[static_cast<std::size_t>(j)] = ((t + j - offset) % nt + nt) % nt;
  }
  return ids;
}

DynamicSeries TrainingSet::as_series() const {
  if (samples.empty()) {
    throw Error(ErrorKind::EmptyDataset, "training set holds no samples");
  }
  DynamicSeries out(nx, ny, static_cast<int>(samples.size()), Domain::KSpace);
  for (std::size_t s = 0; s < samples.size(); ++s) {
    auto frame = out.frame(static_cast<int>(s));
    std::copy(samples[s].begin(), samples[s].end(), frame.begin());
  }
  return out;
}

TrainingSet build_training_set(const DynamicSeries& kspace, const SamplingMask& mask,
                               const InterleavedScheme& scheme, MergeScheme merge) {
  check_shapes(kspace, mask);
  const int R = scheme.accel;
  if (R < 2) throw Error(ErrorKind::InvalidSpec, "window width must be at least 2");
  if (kspace.nt < R) {
    throw Error(ErrorKind::InfeasibleWindow, "series shorter than one merge window");
  }
  const int acs = scheme.acs_lines < 0 ? default_acs_lines(kspace.ny) : scheme.acs_lines;
  const AcsBand band = acs_band(kspace.ny, acs);

  std::vector<std::vector<int>> windows;
  std::vector<TrainingEntry> entries;
  if (scheme.windows == WindowMode::SlidingCircular) {
    for (int t = 0; t < kspace.nt; ++t) {
      windows.push_back(sliding_window_ids(t, R, kspace.nt));
      entries.push_back({windows.back().front(), t});
    }
  } else {
    for (int start = 0; start + R <= kspace.nt; start += R) {
      std::vector<int> ids(static_cast<std::size_t>(R));
      for (int j = 0; j < R; ++j) ids[static_cast<std::size_t>(j)] = start + j;
      windows.push_back(std::move(ids));
      entries.push_back({start, start + R / 2});
    }
  }

  TrainingSet set;
  set.nx = kspace.nx;
  set.ny = kspace.ny;
  set.entries = entries;
  set.samples.reserve(windows.size());

  for (std::size_t w = 0; w < windows.size(); ++w) {
    const auto& ids = windows[w];
    const int center = entries[w].center_frame;
    if (merge == MergeScheme::TimeInterleaved) {
      auto sample = merge_window(kspace, mask, ids, band);
      // The merged ACS band is a temporal mean; restore the center frame's
      // own measurements there so low frequencies describe one time point.
      for (int y = band.lo; y < band.hi; ++y) {
        for (int x = 0; x < kspace.nx; ++x) {
          if (mask.at(center, y, x)) {
            sample[static_cast<std::size_t>(y) * kspace.nx + x] = kspace.at(center, y, x);
          }
        }
      }
      set.samples.push_back(std::move(sample));
    } else {
      set.samples.push_back(merge_by_averaging(kspace, mask, ids));
    }
  }
  return set;
}

}  // namespace cinediff
