#pragma once

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace cinediff {

/// Deterministic 64-bit generator (SplitMix64). Streams for independent
/// purposes are derived by hashing a key tuple, never by sharing state, so
/// identical seeds reproduce identical draws regardless of call order
/// elsewhere in the program.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1).
  double uniform();
  /// Uniform integer in [0, n).
  std::uint64_t uniform_int(std::uint64_t n);
  /// Standard normal via Box-Muller; consumes exactly two raw draws.
  double gaussian();
  /// Independent standard normal real and imaginary parts.
  std::complex<double> gaussian_complex();

 private:
  std::uint64_t state_;
};

/// Finalizer used both for stream advancement and key mixing.
std::uint64_t mix64(std::uint64_t x);

/// Collapses a key tuple (seed, purpose, indices...) into a stream seed.
std::uint64_t derive_key(std::initializer_list<std::uint64_t> parts);

/// Rng for a named site; the tuple identifies one noise-injection event.
Rng stream(std::initializer_list<std::uint64_t> parts);

void fill_gaussian(Rng& rng, std::span<std::complex<double>> out);
std::vector<std::complex<double>> gaussian_field(std::initializer_list<std::uint64_t> key,
                                                 std::size_t n);

}  // namespace cinediff
