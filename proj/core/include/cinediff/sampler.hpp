#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cinediff/schedule.hpp"
#include "cinediff/score.hpp"

namespace cinediff {

/// Reverse-diffusion controls. The ladder is consumed one level per outer
/// step, so T must not exceed the schedule's level count; reconstruction
/// builds the schedule with n_levels == T.
struct SamplerConfig {
  int T = 300;
  int J = 1;
  double r = 0.075;
  NoiseSchedule schedule;
  std::uint64_t seed = 0;
};

Result validate(const SamplerConfig& config);

/// Identifies one noise-injection event; every draw is keyed by the full
/// tuple so trajectories are reproducible and cross-step independent.
struct NoiseKey {
  std::uint64_t seed = 0;
  std::uint64_t purpose = 0;
  std::uint64_t level = 0;
  std::uint64_t step = 0;
  std::uint64_t site = 0;
};

namespace noise_tag {
inline constexpr std::uint64_t kInit = 0x696e6974ULL;       // "init"
inline constexpr std::uint64_t kPredictor = 0x70726564ULL;  // "pred"
inline constexpr std::uint64_t kCorrector = 0x636f7272ULL;  // "corr"
inline constexpr std::uint64_t kGmPredictor = 0x676d7072ULL;
inline constexpr std::uint64_t kGmCorrector = 0x676d636fULL;
inline constexpr std::uint64_t kLmPredictor = 0x6c6d7072ULL;
inline constexpr std::uint64_t kLmCorrector = 0x6c6d636fULL;
}  // namespace noise_tag

std::vector<Complex> gaussian_noise(const NoiseKey& key, std::size_t n);

/// Reverse-SDE discretization from noise level sigma_t1 down to sigma_t:
///   x + (sigma_t1^2 - sigma_t^2) * S(x, sigma_t1) + sqrt(sigma_t1^2 - sigma_t^2) * z.
/// Equal levels are a guarded no-op (no score call, no noise); sigma_t1 <
/// sigma_t violates the ladder order.
std::vector<Complex> predictor_step(std::span<const Complex> x, const ScoreFunction& model,
                                    double sigma_t, double sigma_t1, const NoiseKey& key);

struct CorrectorResult {
  std::vector<Complex> x;
  double eps = 0.0;
  double z_norm = 0.0;
  double score_norm = 0.0;
};

/// Annealed Langevin refinement at fixed sigma_t:
///   x + eps * S(x, sigma_t) + sqrt(2 eps) * z,
/// with the signal-adaptive step eps = 2 * (r * ||z|| / ||S||)^2 computed
/// from the step's own noise draw. A zero score leaves x untouched.
CorrectorResult corrector_step(std::span<const Complex> x, const ScoreFunction& model,
                               double sigma_t, double r, const NoiseKey& key);

struct SamplerStepTrace {
  int level = 0;
  double sigma = 0.0;
  std::string phase;
  std::uint64_t site = 0;
  double x_norm = 0.0;
  double score_norm = 0.0;
  double eps = 0.0;
};

/// Per-call labels and noise tags so independent chains (one per frame, one
/// per model) draw independent noise under a single run seed.
struct LevelContext {
  std::uint64_t site = 0;
  std::uint64_t predictor_tag = noise_tag::kPredictor;
  std::uint64_t corrector_tag = noise_tag::kCorrector;
  const char* label = "";
  std::vector<SamplerStepTrace>* trace = nullptr;
};

/// One outer iteration at level t: a predictor step from level t+1 (the top
/// level runs a degenerate in-place predictor, so injected predictor
/// variance telescopes to sigma_max^2 - sigma_min^2 over the ladder)
/// followed by J corrector steps at level t.
std::vector<Complex> sample_level(std::span<const Complex> x, const ScoreFunction& model, int t,
                                  const SamplerConfig& config, const LevelContext& ctx = {});

/// Ladder-top initialization: x ~ N(0, sigma(T-1)^2) per real component.
std::vector<Complex> sample_init(const SamplerConfig& config, std::size_t cells,
                                 std::uint64_t site = 0);

/// Full ladder T-1 .. 0 from a fresh initialization; the unconditional
/// sampling path used by the statistical oracles.
std::vector<Complex> run_ladder(const ScoreFunction& model, const SamplerConfig& config,
                                std::size_t cells, std::uint64_t site = 0,
                                std::vector<SamplerStepTrace>* trace = nullptr);

}  // namespace cinediff
