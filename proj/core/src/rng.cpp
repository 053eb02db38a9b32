#include "cinediff/rng.hpp"

#include <cmath>
#include <numbers>

namespace cinediff {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t Rng::next_u64() {
  state_ += 0x9e3779b97f4a7c15ULL;
  std::uint64_t x = state_;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double Rng::uniform() {
  // 53-bit mantissa shifted to the open interval: never 0, never 1.
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1p-53;
}

std::uint64_t Rng::uniform_int(std::uint64_t n) {
  // Rejection-free modulo is fine here: n is tiny relative to 2^64 in every
  // call site (line counts, frame counts), so bias is < 2^-50.
  return n == 0 ? 0 : next_u64() % n;
}

double Rng::gaussian() {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::complex<double> Rng::gaussian_complex() {
  const double re = gaussian();
  const double im = gaussian();
  return {re, im};
}

std::uint64_t derive_key(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = 0x6c696e65736b6579ULL;
  for (std::uint64_t p : parts) {
    h = mix64(h ^ mix64(p));
  }
  return h;
}

Rng stream(std::initializer_list<std::uint64_t> parts) { return Rng(derive_key(parts)); }

void fill_gaussian(Rng& rng, std::span<std::complex<double>> out) {
  for (auto& v : out) v = rng.gaussian_complex();
}

std::vector<std::complex<double>> gaussian_field(std::initializer_list<std::uint64_t> key,
                                                 std::size_t n) {
  Rng rng = stream(key);
  std::vector<std::complex<double>> out(n);
  fill_gaussian(rng, out);
  return out;
}

}  // namespace cinediff
