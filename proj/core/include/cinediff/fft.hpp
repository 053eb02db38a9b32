#pragma once

#include <span>

#include "cinediff/types.hpp"

namespace cinediff {

/// Centered unitary 2D transforms. The zero-frequency bin sits at
/// (floor(ny/2), floor(nx/2)); forward then inverse reproduces the input to
/// rounding error and Parseval's identity holds exactly in exact arithmetic
/// because both directions scale by 1/sqrt(nx*ny).
///
/// Frame-level calls are raw math on [y][x] row-major buffers. Series-level
/// calls additionally enforce and update the domain tag.

void fft2c_frame(std::span<const Complex> in, std::span<Complex> out, int nx, int ny);
void ifft2c_frame(std::span<const Complex> in, std::span<Complex> out, int nx, int ny);

/// Per-frame forward transform; requires Domain::Image, returns Domain::KSpace.
DynamicSeries fft2c(const DynamicSeries& series);
/// Per-frame inverse transform; requires Domain::KSpace, returns Domain::Image.
DynamicSeries ifft2c(const DynamicSeries& series);

}  // namespace cinediff
