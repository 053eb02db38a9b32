#include "cinediff/masks.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "cinediff/rng.hpp"

namespace cinediff {

namespace {

constexpr std::uint64_t kMaskPurpose = 0x6d61736bULL;  // "mask"
constexpr std::uint64_t kMeasPurpose = 0x6d656173ULL;  // "meas"

int integer_accel(const MaskSpec& spec) {
  const double r = spec.accel;
  const long rounded = std::lround(r);
  if (std::abs(r - static_cast<double>(rounded)) > 1e-9 || rounded < 2) {
    std::ostringstream msg;
    msg << "interleaved masks need an integer accel >= 2, got " << r;
    throw Error(ErrorKind::InvalidSpec, msg.str());
  }
  return static_cast<int>(rounded);
}

void fill_line(SamplingMask& mask, int t, int y) {
  for (int x = 0; x < mask.nx; ++x) mask.at(t, y, x) = 1;
}

void fill_acs(SamplingMask& mask, const AcsBand& band) {
  for (int t = 0; t < mask.nt; ++t) {
    for (int y = band.lo; y < band.hi; ++y) fill_line(mask, t, y);
  }
}

SamplingMask make_interleaved_uniform(const MaskSpec& spec, int nx, int ny, int nt,
                                      const AcsBand& band) {
  const int R = integer_accel(spec);
  if (R > ny) {
    throw Error(ErrorKind::InfeasibleSpec, "accel exceeds the number of phase-encode lines");
  }
  SamplingMask mask(nx, ny, nt);
  for (int t = 0; t < nt; ++t) {
    for (int y = 0; y < ny; ++y) {
      if (y % R == t % R) fill_line(mask, t, y);
    }
  }
  fill_acs(mask, band);
  return mask;
}

SamplingMask make_interleaved_random(const MaskSpec& spec, int nx, int ny, int nt,
                                     const AcsBand& band) {
  const int R = integer_accel(spec);
  if (R > ny) {
    throw Error(ErrorKind::InfeasibleSpec, "accel exceeds the number of phase-encode lines");
  }
  SamplingMask mask(nx, ny, nt);
  for (int w = 0; w * R < nt; ++w) {
    const int start = w * R;
    const int width = std::min(R, nt - start);
    for (int y = 0; y < ny; ++y) {
      if (band.contains(y)) continue;
      Rng rng = stream({spec.seed, kMaskPurpose, static_cast<std::uint64_t>(w),
                        static_cast<std::uint64_t>(y)});
      const int owner = start + static_cast<int>(rng.uniform_int(width));
      fill_line(mask, owner, y);
    }
  }
  fill_acs(mask, band);
  return mask;
}

SamplingMask make_cartesian(const MaskSpec& spec, int nx, int ny, int nt, const AcsBand& band) {
  if (!(spec.accel > 1.0)) {
    throw Error(ErrorKind::InvalidSpec, "accel must exceed 1");
  }
  const int budget = static_cast<int>(std::lround(static_cast<double>(ny) / spec.accel));
  if (budget < 1 || budget < band.lines()) {
    std::ostringstream msg;
    msg << "line budget " << budget << " per frame cannot hold the " << band.lines()
        << "-line ACS band at accel " << spec.accel;
    throw Error(ErrorKind::InfeasibleSpec, msg.str());
  }
  const double realized = static_cast<double>(ny) / static_cast<double>(budget);
  if (std::abs(realized - spec.accel) > 0.1 * spec.accel) {
    std::ostringstream msg;
    msg << "realized acceleration " << realized << " misses requested " << spec.accel
        << " by more than 10 percent";
    throw Error(ErrorKind::InfeasibleSpec, msg.str());
  }

  std::vector<int> outside;
  outside.reserve(ny);
  for (int y = 0; y < ny; ++y) {
    if (!band.contains(y)) outside.push_back(y);
  }

  SamplingMask mask(nx, ny, nt);
  fill_acs(mask, band);
  const int n_random = budget - band.lines();
  for (int t = 0; t < nt; ++t) {
    // Partial Fisher-Yates: the first n_random entries are a uniform
    // without-replacement draw.
    std::vector<int> pool = outside;
    Rng rng = stream({spec.seed, kMaskPurpose, static_cast<std::uint64_t>(t)});
    for (int i = 0; i < n_random && i < static_cast<int>(pool.size()); ++i) {
      const std::size_t j = i + rng.uniform_int(pool.size() - i);
      std::swap(pool[i], pool[j]);
      fill_line(mask, t, pool[i]);
    }
  }
  return mask;
}

/// Rasterize one full-diameter spoke through the grid center.
void fill_spoke(SamplingMask& mask, int t, double theta) {
  const int cx = mask.nx / 2;
  const int cy = mask.ny / 2;
  const double dx = std::cos(theta);
  const double dy = std::sin(theta);
  const double reach = std::hypot(mask.nx, mask.ny);
  // Half-pixel steps cannot skip a grid cell along the spoke.
  for (double r = -reach; r <= reach; r += 0.5) {
    const int x = static_cast<int>(std::lround(cx + r * dx));
    const int y = static_cast<int>(std::lround(cy + r * dy));
    if (x >= 0 && x < mask.nx && y >= 0 && y < mask.ny) mask.at(t, y, x) = 1;
  }
}

SamplingMask make_radial(const MaskSpec& spec, int nx, int ny, int nt) {
  if (!(spec.accel > 1.0)) {
    throw Error(ErrorKind::InvalidSpec, "accel must exceed 1");
  }
  // Golden-angle increment keeps spokes evenly spread for any count while the
  // global index offset rotates the pattern from frame to frame.
  const double golden = std::numbers::pi * (std::sqrt(5.0) - 1.0) / 2.0;
  const double target = static_cast<double>(nx) * ny / spec.accel;

  auto realized_cells = [&](int spokes) {
    SamplingMask probe(nx, ny, 1);
    for (int s = 0; s < spokes; ++s) fill_spoke(probe, 0, std::fmod(s * golden, std::numbers::pi));
    return static_cast<double>(probe.count_acquired());
  };

  // Coverage grows monotonically with the spoke count; binary search the
  // smallest count reaching the target, then keep the closer neighbour.
  int lo = 1, hi = 4 * std::max(nx, ny);
  if (realized_cells(hi) < target) {
    throw Error(ErrorKind::InfeasibleSpec, "accel too low for a spoke pattern on this grid");
  }
  while (lo < hi) {
    const int mid = lo + (hi - lo) / 2;
    if (realized_cells(mid) < target) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  int spokes = lo;
  if (spokes > 1 &&
      std::abs(realized_cells(spokes - 1) - target) < std::abs(realized_cells(spokes) - target)) {
    spokes -= 1;
  }

  SamplingMask mask(nx, ny, nt);
  for (int t = 0; t < nt; ++t) {
    for (int s = 0; s < spokes; ++s) {
      const long long global = static_cast<long long>(t) * spokes + s;
      fill_spoke(mask, t, std::fmod(static_cast<double>(global) * golden, std::numbers::pi));
    }
  }

  const double realized = mask.realized_acceleration();
  if (std::abs(realized - spec.accel) > 0.1 * spec.accel) {
    std::ostringstream msg;
    msg << "realized acceleration " << realized << " misses requested " << spec.accel
        << " by more than 10 percent";
    throw Error(ErrorKind::InfeasibleSpec, msg.str());
  }
  return mask;
}

}  // namespace

const char* to_string(MaskFamily family) {
  switch (family) {
    case MaskFamily::InterleavedUniform: return "interleaved-uniform";
    case MaskFamily::InterleavedRandom: return "interleaved-random";
    case MaskFamily::Cartesian: return "cartesian";
    case MaskFamily::Radial: return "radial";
  }
  return "unknown";
}

int default_acs_lines(int ny) {
  return std::max(2, static_cast<int>(std::lround(static_cast<double>(ny) * 8.0 / 192.0)));
}

AcsBand acs_band(int ny, int acs_lines) {
  if (acs_lines < 0 || acs_lines > ny) {
    throw Error(ErrorKind::InvalidSpec, "acs_lines outside [0, ny]");
  }
  AcsBand band;
  band.lo = ny / 2 - acs_lines / 2;
  band.hi = band.lo + acs_lines;
  return band;
}

SamplingMask make_mask(const MaskSpec& spec, int nx, int ny, int nt) {
  if (nx <= 0 || ny <= 0 || nt <= 0) {
    throw Error(ErrorKind::DegenerateShape, "mask dimensions must be positive");
  }
  const int acs = spec.acs_lines < 0 ? default_acs_lines(ny) : spec.acs_lines;
  const AcsBand band = acs_band(ny, acs);
  switch (spec.family) {
    case MaskFamily::InterleavedUniform: return make_interleaved_uniform(spec, nx, ny, nt, band);
    case MaskFamily::InterleavedRandom: return make_interleaved_random(spec, nx, ny, nt, band);
    case MaskFamily::Cartesian: return make_cartesian(spec, nx, ny, nt, band);
    case MaskFamily::Radial: return make_radial(spec, nx, ny, nt);
  }
  throw Error(ErrorKind::InvalidSpec, "unknown mask family");
}

DynamicSeries undersample(const DynamicSeries& kspace, const SamplingMask& mask,
                          double noise_sigma, std::uint64_t seed) {
  validate_compatible(kspace, mask).require();
  if (kspace.domain != Domain::KSpace) {
    throw Error(ErrorKind::DomainMismatch, "undersample expects a k-space series");
  }
  if (noise_sigma < 0.0 || !std::isfinite(noise_sigma)) {
    throw Error(ErrorKind::InvalidArgument, "noise_sigma must be finite and non-negative");
  }

  DynamicSeries out(kspace.nx, kspace.ny, kspace.nt, Domain::KSpace);
  const std::size_t fs = kspace.frame_size();
  for (int t = 0; t < kspace.nt; ++t) {
    auto src = kspace.frame(t);
    auto dst = out.frame(t);
    std::vector<Complex> noise;
    if (noise_sigma > 0.0) {
      // The noise field is drawn for every cell so the draw at a given cell
      // does not depend on the mask pattern.
      noise = gaussian_field({seed, kMeasPurpose, static_cast<std::uint64_t>(t)}, fs);
    }
    const std::uint8_t* m = mask.acquired.data() + static_cast<std::size_t>(t) * fs;
    for (std::size_t i = 0; i < fs; ++i) {
      if (!m[i]) continue;
      dst[i] = src[i];
      if (noise_sigma > 0.0) dst[i] += noise_sigma * noise[i];
    }
  }
  return out;
}

}  // namespace cinediff
