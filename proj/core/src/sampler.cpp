#include "cinediff/sampler.hpp"

#include <cmath>
#include <sstream>

#include "cinediff/rng.hpp"

namespace cinediff {

namespace {

double norm2(std::span<const Complex> v) {
  double s = 0.0;
  for (const auto& c : v) s += c.real() * c.real() + c.imag() * c.imag();
  return std::sqrt(s);
}

std::string phase_name(const char* label, const char* step) {
  std::string out(label);
  if (!out.empty()) out += "-";
  out += step;
  return out;
}

}  // namespace

Result validate(const SamplerConfig& config) {
  if (config.T < 1) return Result::failure(ErrorKind::InvalidArgument, "T must be positive");
  if (config.J < 1) return Result::failure(ErrorKind::InvalidArgument, "J must be at least 1");
  if (!(config.r > 0.0)) {
    return Result::failure(ErrorKind::InvalidArgument, "r must be positive");
  }
  if (config.T > config.schedule.n_levels) {
    std::ostringstream msg;
    msg << "T=" << config.T << " exceeds the schedule's " << config.schedule.n_levels
        << " levels";
    return Result::failure(ErrorKind::InvalidArgument, msg.str());
  }
  return Result::success();
}

std::vector<Complex> gaussian_noise(const NoiseKey& key, std::size_t n) {
  return gaussian_field({key.seed, key.purpose, key.level, key.step, key.site}, n);
}

std::vector<Complex> predictor_step(std::span<const Complex> x, const ScoreFunction& model,
                                    double sigma_t, double sigma_t1, const NoiseKey& key) {
  if (!(sigma_t >= 0.0) || !std::isfinite(sigma_t) || !std::isfinite(sigma_t1)) {
    throw Error(ErrorKind::NonPositiveSigma, "predictor sigmas must be finite, sigma_t >= 0");
  }
  if (sigma_t1 < sigma_t) {
    std::ostringstream msg;
    msg << "predictor runs down the ladder: sigma_t1 (" << sigma_t1
        << ") must be >= sigma_t (" << sigma_t << ")";
    throw Error(ErrorKind::ScheduleOrderViolation, msg.str());
  }
  if (sigma_t1 == sigma_t) {
    return {x.begin(), x.end()};  // degenerate step, no noise consumed
  }

  const double dv = sigma_t1 * sigma_t1 - sigma_t * sigma_t;
  const std::vector<Complex> s = model.score_of(x, sigma_t1);
  const std::vector<Complex> z = gaussian_noise(key, x.size());
  std::vector<Complex> out(x.size());
  const double amp = std::sqrt(dv);
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = x[i] + dv * s[i] + amp * z[i];
  }
  return out;
}

CorrectorResult corrector_step(std::span<const Complex> x, const ScoreFunction& model,
                               double sigma_t, double r, const NoiseKey& key) {
  if (!(sigma_t > 0.0) || !std::isfinite(sigma_t)) {
    throw Error(ErrorKind::NonPositiveSigma, "corrector requires sigma_t > 0");
  }
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw Error(ErrorKind::InvalidArgument, "corrector requires r > 0");
  }

  CorrectorResult result;
  const std::vector<Complex> s = model.score_of(x, sigma_t);
  result.score_norm = norm2(s);
  if (result.score_norm == 0.0) {
    result.x.assign(x.begin(), x.end());  // guard: no drift, no noise
    return result;
  }
  const std::vector<Complex> z = gaussian_noise(key, x.size());
  result.z_norm = norm2(z);
  const double ratio = r * result.z_norm / result.score_norm;
  result.eps = 2.0 * ratio * ratio;
  const double amp = std::sqrt(2.0 * result.eps);
  result.x.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    result.x[i] = x[i] + result.eps * s[i] + amp * z[i];
  }
  return result;
}

std::vector<Complex> sample_level(std::span<const Complex> x, const ScoreFunction& model, int t,
                                  const SamplerConfig& config, const LevelContext& ctx) {
  validate(config).require();
  if (t < 0 || t >= config.T) {
    std::ostringstream msg;
    msg << "level " << t << " outside [0, " << config.T << ")";
    throw Error(ErrorKind::InvalidArgument, msg.str());
  }

  const double sigma_lo = config.schedule.sigma(t);
  const double sigma_hi = (t + 1 < config.T) ? config.schedule.sigma(t + 1) : sigma_lo;

  NoiseKey pkey{config.seed, ctx.predictor_tag, static_cast<std::uint64_t>(t), 0, ctx.site};
  std::vector<Complex> cur = predictor_step(x, model, sigma_lo, sigma_hi, pkey);
  if (ctx.trace) {
    ctx.trace->push_back({t, sigma_lo, phase_name(ctx.label, "predictor"), ctx.site,
                          norm2(cur), 0.0, 0.0});
  }

  for (int j = 0; j < config.J; ++j) {
    NoiseKey ckey{config.seed, ctx.corrector_tag, static_cast<std::uint64_t>(t),
                  static_cast<std::uint64_t>(j), ctx.site};
    CorrectorResult step = corrector_step(cur, model, sigma_lo, config.r, ckey);
    cur = std::move(step.x);
    if (ctx.trace) {
      ctx.trace->push_back({t, sigma_lo, phase_name(ctx.label, "corrector"), ctx.site,
                            norm2(cur), step.score_norm, step.eps});
    }
  }
  return cur;
}

std::vector<Complex> sample_init(const SamplerConfig& config, std::size_t cells,
                                 std::uint64_t site) {
  validate(config).require();
  const double sigma_top = config.schedule.sigma(config.T - 1);
  NoiseKey key{config.seed, noise_tag::kInit, 0, 0, site};
  std::vector<Complex> x = gaussian_noise(key, cells);
  for (auto& v : x) v *= sigma_top;
  return x;
}

std::vector<Complex> run_ladder(const ScoreFunction& model, const SamplerConfig& config,
                                std::size_t cells, std::uint64_t site,
                                std::vector<SamplerStepTrace>* trace) {
  std::vector<Complex> x = sample_init(config, cells, site);
  LevelContext ctx;
  ctx.site = site;
  ctx.trace = trace;
  for (int t = config.T - 1; t >= 0; --t) {
    x = sample_level(x, model, t, config, ctx);
  }
  return x;
}

}  // namespace cinediff
