#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "cinediff/rng.hpp"
#include "cinediff/sampler.hpp"

using namespace cinediff;

namespace {

double norm2(std::span<const Complex> v) {
  double s = 0.0;
  for (const auto& c : v) s += std::norm(c);
  return std::sqrt(s);
}

SamplerConfig small_config(int T, std::uint64_t seed) {
  SamplerConfig config;
  config.T = T;
  config.J = 1;
  config.r = 0.075;
  config.schedule = NoiseSchedule::geometric(0.05, 8.0, T);
  config.seed = seed;
  return config;
}

}  // namespace

TEST_CASE("predictor applies the discretized reverse step", "[sampler]") {
  const std::vector<Complex> mean(16, Complex(0.2, -0.1));
  AnalyticGaussianScore model(mean, 1.5);
  const auto x = gaussian_field({4, 1}, 16);

  const double sigma_t = 0.5, sigma_t1 = 0.9;
  const NoiseKey key{11, noise_tag::kPredictor, 3, 0, 2};
  const auto out = predictor_step(x, model, sigma_t, sigma_t1, key);

  // recompute with the same keyed noise
  const auto z = gaussian_noise(key, 16);
  const auto s = model.score_of(x, sigma_t1);
  const double dv = sigma_t1 * sigma_t1 - sigma_t * sigma_t;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const Complex expected = x[i] + dv * s[i] + std::sqrt(dv) * z[i];
    REQUIRE_THAT(std::abs(out[i] - expected), Catch::Matchers::WithinAbs(0.0, 1e-15));
  }

  SECTION("equal levels are a guarded no-op") {
    const auto same = predictor_step(x, model, 0.5, 0.5, key);
    REQUIRE(std::equal(same.begin(), same.end(), x.begin()));
  }

  SECTION("running up the ladder is an order violation") {
    try {
      predictor_step(x, model, 0.9, 0.5, key);
      FAIL("expected ScheduleOrderViolation");
    } catch (const Error& e) {
      REQUIRE(e.kind() == ErrorKind::ScheduleOrderViolation);
    }
  }
}

TEST_CASE("corrector uses the signal-adaptive step size", "[sampler]") {
  const std::vector<Complex> mean(16, Complex(0, 0));
  AnalyticGaussianScore model(mean, 1.0);
  const auto x = gaussian_field({5, 2}, 16);
  const NoiseKey key{12, noise_tag::kCorrector, 2, 0, 0};

  const CorrectorResult res = corrector_step(x, model, 0.4, 0.075, key);

  const auto z = gaussian_noise(key, 16);
  const auto s = model.score_of(x, 0.4);
  const double eps = 2.0 * std::pow(0.075 * norm2(z) / norm2(s), 2.0);
  REQUIRE_THAT(res.eps, Catch::Matchers::WithinRel(eps, 1e-12));
  for (std::size_t i = 0; i < x.size(); ++i) {
    const Complex expected = x[i] + eps * s[i] + std::sqrt(2.0 * eps) * z[i];
    REQUIRE_THAT(std::abs(res.x[i] - expected), Catch::Matchers::WithinAbs(0.0, 1e-13));
  }

  SECTION("step size scales with r squared") {
    const CorrectorResult doubled = corrector_step(x, model, 0.4, 0.15, key);
    REQUIRE_THAT(doubled.eps, Catch::Matchers::WithinRel(4.0 * res.eps, 1e-12));
  }

  SECTION("a zero score leaves the state untouched") {
    ZeroScore zero;
    const CorrectorResult still = corrector_step(x, zero, 0.4, 0.075, key);
    REQUIRE(std::equal(still.x.begin(), still.x.end(), x.begin()));
    REQUIRE(still.eps == 0.0);
  }
}

TEST_CASE("initialization draws at the ladder top", "[sampler]") {
  const SamplerConfig config = small_config(20, 77);
  const auto x = sample_init(config, 5000, 0);
  const double sigma_top = config.schedule.sigma(19);

  double var = 0.0;
  for (const Complex& v : x) var += std::norm(v);
  var /= 2.0 * 5000;  // per real component
  REQUIRE_THAT(var, Catch::Matchers::WithinRel(sigma_top * sigma_top, 0.05));

  SECTION("sites draw independently") {
    REQUIRE(sample_init(config, 100, 0) != sample_init(config, 100, 1));
    REQUIRE(sample_init(config, 100, 0) == sample_init(config, 100, 0));
  }
}

TEST_CASE("predictor noise variance telescopes over the ladder", "[sampler]") {
  // with a zero score the ladder adds keyed noise only: the degenerate top
  // level injects nothing and every step below adds sigma(t+1)^2 - sigma(t)^2,
  // which telescopes to sigma_max^2 - sigma_min^2
  const SamplerConfig config = small_config(12, 31);
  ZeroScore zero;

  double injected = 0.0;
  for (int t = 0; t < config.T - 1; ++t) {
    injected += config.schedule.sigma(t + 1) * config.schedule.sigma(t + 1) -
                config.schedule.sigma(t) * config.schedule.sigma(t);
  }
  const double smax = config.schedule.sigma(config.T - 1);
  const double smin = config.schedule.sigma(0);
  REQUIRE_THAT(injected, Catch::Matchers::WithinRel(smax * smax - smin * smin, 1e-12));

  SECTION("the chain reproduces the telescoped sum exactly") {
    std::vector<Complex> x = sample_init(config, 8, 4);
    const std::vector<Complex> x0 = x;
    LevelContext ctx;
    ctx.site = 4;
    for (int t = config.T - 1; t >= 0; --t) x = sample_level(x, zero, t, config, ctx);

    // reconstruct the same trajectory from the keyed draws
    std::vector<Complex> manual = x0;
    for (int t = config.T - 2; t >= 0; --t) {
      const double hi = config.schedule.sigma(t + 1), lo = config.schedule.sigma(t);
      const double amp = std::sqrt(hi * hi - lo * lo);
      const auto z = gaussian_noise(
          {config.seed, noise_tag::kPredictor, static_cast<std::uint64_t>(t), 0, 4}, 8);
      for (int i = 0; i < 8; ++i) manual[static_cast<std::size_t>(i)] += amp * z[i];
    }
    for (int i = 0; i < 8; ++i) {
      REQUIRE_THAT(std::abs(x[static_cast<std::size_t>(i)] - manual[static_cast<std::size_t>(i)]),
                   Catch::Matchers::WithinAbs(0.0, 1e-12));
    }
  }
}

TEST_CASE("level composition is predictor then correctors", "[sampler]") {
  const SamplerConfig base = small_config(10, 91);
  const std::vector<Complex> mean(16, Complex(0.1, 0.4));
  AnalyticGaussianScore model(mean, 2.0);
  const auto x = gaussian_field({8, 8}, 16);

  SamplerConfig config = base;
  config.J = 3;
  LevelContext ctx;
  ctx.site = 6;
  std::vector<SamplerStepTrace> trace;
  ctx.trace = &trace;

  const auto out = sample_level(x, model, 4, config, ctx);

  REQUIRE(trace.size() == 4);  // 1 predictor + 3 correctors
  REQUIRE(trace[0].phase == "predictor");
  REQUIRE(trace[1].phase == "corrector");
  REQUIRE(trace[3].sigma == config.schedule.sigma(4));

  // manual recomposition with the same keys
  auto cur = predictor_step(x, model, config.schedule.sigma(4), config.schedule.sigma(5),
                            {config.seed, noise_tag::kPredictor, 4, 0, 6});
  for (int j = 0; j < 3; ++j) {
    cur = corrector_step(cur, model, config.schedule.sigma(4), config.r,
                         {config.seed, noise_tag::kCorrector, 4, static_cast<std::uint64_t>(j), 6})
              .x;
  }
  REQUIRE(out == cur);

  SECTION("top level runs the degenerate predictor") {
    std::vector<SamplerStepTrace> top_trace;
    LevelContext top_ctx;
    top_ctx.site = 6;
    top_ctx.trace = &top_trace;
    const auto top = sample_level(x, model, 9, config, top_ctx);
    // degenerate predictor leaves x; correctors act at sigma(9)
    auto manual = std::vector<Complex>(x.begin(), x.end());
    for (int j = 0; j < 3; ++j) {
      manual = corrector_step(manual, model, config.schedule.sigma(9), config.r,
                              {config.seed, noise_tag::kCorrector, 9,
                               static_cast<std::uint64_t>(j), 6})
                   .x;
    }
    REQUIRE(top == manual);
  }

  SECTION("config validation") {
    SamplerConfig bad = base;
    bad.T = 11;  // more levels than the schedule holds
    REQUIRE_FALSE(validate(bad));
    bad = base;
    bad.J = 0;
    REQUIRE_FALSE(validate(bad));
    bad = base;
    bad.r = 0.0;
    REQUIRE_FALSE(validate(bad));
  }
}

TEST_CASE("full ladders are deterministic per site", "[sampler]") {
  const SamplerConfig config = small_config(15, 13);
  const std::vector<Complex> mean(9, Complex(0.3, 0.0));
  AnalyticGaussianScore model(mean, 1.0);

  const auto a = run_ladder(model, config, 9, 2);
  const auto b = run_ladder(model, config, 9, 2);
  REQUIRE(a == b);
  REQUIRE(a != run_ladder(model, config, 9, 3));

  SECTION("trace captures every step in ladder order") {
    std::vector<SamplerStepTrace> trace;
    run_ladder(model, config, 9, 2, &trace);
    REQUIRE(trace.size() == 2 * 15);
    REQUIRE(trace.front().level == 14);
    REQUIRE(trace.back().level == 0);
    for (std::size_t i = 0; i + 2 < trace.size(); i += 2) {
      REQUIRE(trace[i].level == trace[i + 1].level);
      REQUIRE(trace[i].level == trace[i + 2].level + 1);
    }
  }
}
