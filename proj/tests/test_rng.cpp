#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "cinediff/rng.hpp"
#include "cinediff/types.hpp"

using namespace cinediff;

TEST_CASE("counter streams are deterministic and keyed", "[rng]") {
  SECTION("same seed, same sequence") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) REQUIRE(a.next_u64() == b.next_u64());
  }

  SECTION("derive_key separates tuples") {
    std::set<std::uint64_t> keys;
    for (std::uint64_t s = 0; s < 8; ++s) {
      for (std::uint64_t p = 0; p < 8; ++p) keys.insert(derive_key({s, p}));
    }
    REQUIRE(keys.size() == 64);
  }

  SECTION("stream order matters") {
    REQUIRE(stream({1, 2}).next_u64() != stream({2, 1}).next_u64());
  }

  SECTION("gaussian_field reproduces bitwise") {
    const auto a = gaussian_field({7, 0x616263}, 256);
    const auto b = gaussian_field({7, 0x616263}, 256);
    REQUIRE(a == b);
    const auto c = gaussian_field({7, 0x616264}, 256);
    REQUIRE(a != c);
  }
}

TEST_CASE("uniform and gaussian draws have the right moments", "[rng]") {
  Rng rng(2024);
  const int n = 200000;

  SECTION("uniform in [0,1) with mean 1/2") {
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      const double u = rng.uniform();
      REQUIRE(u >= 0.0);
      REQUIRE(u < 1.0);
      sum += u;
    }
    REQUIRE_THAT(sum / n, Catch::Matchers::WithinAbs(0.5, 5e-3));
  }

  SECTION("uniform_int covers [0,n) uniformly") {
    int counts[7] = {};
    for (int i = 0; i < 70000; ++i) ++counts[rng.uniform_int(7)];
    for (int c : counts) REQUIRE_THAT(c, Catch::Matchers::WithinAbs(10000, 500));
  }

  SECTION("gaussian has unit variance and zero mean") {
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
      const double g = rng.gaussian();
      sum += g;
      sq += g * g;
    }
    REQUIRE_THAT(sum / n, Catch::Matchers::WithinAbs(0.0, 0.01));
    REQUIRE_THAT(sq / n, Catch::Matchers::WithinAbs(1.0, 0.02));
  }

  SECTION("gaussian_complex has unit variance per real component") {
    double re2 = 0.0, im2 = 0.0, cross = 0.0;
    for (int i = 0; i < n; ++i) {
      const Complex z = rng.gaussian_complex();
      re2 += z.real() * z.real();
      im2 += z.imag() * z.imag();
      cross += z.real() * z.imag();
    }
    REQUIRE_THAT(re2 / n, Catch::Matchers::WithinAbs(1.0, 0.02));
    REQUIRE_THAT(im2 / n, Catch::Matchers::WithinAbs(1.0, 0.02));
    REQUIRE_THAT(cross / n, Catch::Matchers::WithinAbs(0.0, 0.02));
  }
}
