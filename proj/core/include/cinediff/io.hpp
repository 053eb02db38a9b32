#pragma once

#include <filesystem>

#include "cinediff/types.hpp"

namespace cinediff {

/// Binary container for complex series and binary masks.
///
/// Layout, all little-endian:
///   bytes 0-3   magic "KDS1"
///   bytes 4-15  u32 nx, u32 ny, u32 nt
///   byte  16    domain (0 = image, 1 = kspace)
///   byte  17    dtype  (0 = complex float pairs, 1 = u8 mask)
///   bytes 18-23 reserved, zero on write, ignored on read
/// followed by nt*ny*nx cells in frame-major (t, y, x) order: (re, im) f32
/// pairs for complex payloads, single bytes holding 0/1 for masks.
///
/// Complex values are stored at f32 precision; a write/read round trip
/// reproduces the f32 quantization of the input exactly.

void write_series(const DynamicSeries& series, const std::filesystem::path& path);
DynamicSeries read_series(const std::filesystem::path& path);

void write_mask(const SamplingMask& mask, const std::filesystem::path& path);
SamplingMask read_mask(const std::filesystem::path& path);

/// Peek at the dtype byte without loading the payload. 0 = series, 1 = mask.
int kds_dtype(const std::filesystem::path& path);

}  // namespace cinediff
