#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "cinediff/error.hpp"

namespace cinediff {

using Complex = std::complex<double>;

enum class Domain : std::uint8_t { Image = 0, KSpace = 1 };

const char* to_string(Domain domain);

/// A 2D+t complex series stored frame-major: index (t, y, x) maps to
/// data[(t * ny + y) * nx + x]. x is the frequency-encode axis, y the
/// phase-encode axis along which undersampling removes whole lines.
struct DynamicSeries {
  int nx = 0;
  int ny = 0;
  int nt = 0;
  Domain domain = Domain::Image;
  std::vector<Complex> data;

  DynamicSeries() = default;
  DynamicSeries(int nx_, int ny_, int nt_, Domain domain_);

  static DynamicSeries zeros(int nx, int ny, int nt, Domain domain) {
    return DynamicSeries(nx, ny, nt, domain);
  }

  std::size_t frame_size() const { return static_cast<std::size_t>(nx) * ny; }
  std::size_t size() const { return frame_size() * nt; }

  Complex& at(int t, int y, int x) {
    return data[(static_cast<std::size_t>(t) * ny + y) * nx + x];
  }
  const Complex& at(int t, int y, int x) const {
    return data[(static_cast<std::size_t>(t) * ny + y) * nx + x];
  }

  std::span<Complex> frame(int t) {
    return {data.data() + static_cast<std::size_t>(t) * frame_size(), frame_size()};
  }
  std::span<const Complex> frame(int t) const {
    return {data.data() + static_cast<std::size_t>(t) * frame_size(), frame_size()};
  }

  bool same_shape(const DynamicSeries& other) const {
    return nx == other.nx && ny == other.ny && nt == other.nt;
  }
};

/// Binary acquisition pattern with the same (t, y, x) layout as the series it
/// gates. 1 means the cell was measured.
struct SamplingMask {
  int nx = 0;
  int ny = 0;
  int nt = 0;
  std::vector<std::uint8_t> acquired;

  SamplingMask() = default;
  SamplingMask(int nx_, int ny_, int nt_);

  std::size_t frame_size() const { return static_cast<std::size_t>(nx) * ny; }
  std::size_t size() const { return frame_size() * nt; }

  std::uint8_t& at(int t, int y, int x) {
    return acquired[(static_cast<std::size_t>(t) * ny + y) * nx + x];
  }
  std::uint8_t at(int t, int y, int x) const {
    return acquired[(static_cast<std::size_t>(t) * ny + y) * nx + x];
  }

  /// True if any cell of line y in frame t is acquired.
  bool line_acquired(int t, int y) const;
  std::size_t count_acquired() const;
  /// Total cells divided by acquired cells.
  double realized_acceleration() const;
};

/// Per-coil complex weights. The single-coil identity (nc=1, all ones) makes
/// the forward model reduce to mask-gated FFT.
struct CoilSensitivities {
  int nx = 0;
  int ny = 0;
  int nc = 1;
  std::vector<Complex> values;

  static CoilSensitivities identity(int nx, int ny);
  bool is_identity() const;
};

/// Shape/finiteness checks shared by I/O and pipeline entry points.
Result validate(const DynamicSeries& series);
Result validate(const SamplingMask& mask);
Result validate_compatible(const DynamicSeries& series, const SamplingMask& mask);

}  // namespace cinediff
