#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cinediff/types.hpp"

namespace cinediff {

/// One soft-edged ellipse. Geometry is in normalized coordinates: the frame
/// spans [-1, 1] on both axes. Semi-axes pulse and the center drifts with
/// sinusoids of period nt, so every generated series is exactly periodic in
/// time.
struct PhantomEllipse {
  double cx = 0.0;
  double cy = 0.0;
  double ax = 0.3;
  double ay = 0.3;
  double angle = 0.0;      // rotation, radians
  double intensity = 0.5;  // additive brightness, >= 0
  double pulse = 0.0;      // relative semi-axis modulation amplitude
  double phase = 0.0;      // temporal phase offset, radians
  double drift_x = 0.0;    // center drift amplitude, normalized units
  double drift_y = 0.0;
};

struct PhantomSpec {
  int nx = 64;
  int ny = 64;
  int nt = 16;
  double edge = 0.08;       // smoothstep edge width, normalized units
  double phase_amp = 0.6;   // spatial phase-map amplitude, radians
  std::uint64_t seed = 0;
  std::vector<PhantomEllipse> ellipses;

  /// Beating-heart-like layout: a static body, two contracting chambers and
  /// small vessels, all jittered deterministically from the seed.
  static PhantomSpec cardiac(int nx, int ny, int nt, std::uint64_t seed);
};

/// Render the spec to an image-domain series. Magnitudes are additive over
/// ellipses, clipped to [0, 1]; each pixel carries a smooth static complex
/// phase so real and imaginary channels are both informative.
DynamicSeries generate_phantom(const PhantomSpec& spec);

/// Plain-text spec: one key=value per line, '#' comments, repeated
/// ellipse= lines with ten space-separated numbers
/// (cx cy ax ay angle intensity pulse phase drift_x drift_y).
/// A spec without ellipse lines falls back to the cardiac layout.
PhantomSpec parse_phantom_config(const std::string& text);
std::string phantom_config_text(const PhantomSpec& spec);

}  // namespace cinediff
