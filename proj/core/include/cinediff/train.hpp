#pragma once

#include <cstdint>
#include <vector>

#include "cinediff/schedule.hpp"
#include "cinediff/score_model.hpp"

namespace cinediff {

/// One forward-diffusion draw: noisy = sample + sigma * z with z standard
/// complex Gaussian (iid unit normal per real component), and the exact
/// transition score target = -z / sigma, so sample == noisy + sigma^2 * target.
struct Perturbation {
  std::vector<Complex> noisy;
  std::vector<Complex> z;
  double sigma = 0.0;

  std::vector<Complex> target_score() const;
};

Perturbation perturb(std::span<const Complex> sample, double sigma, std::uint64_t seed);

/// Denoising-score-matching loss with sigma^2 weighting: the mean over the
/// batch of ||sigma * S(x + sigma z, sigma) + z||^2, norms summed over cells.
/// Noise levels are drawn uniformly from the schedule per sample. A zero
/// score function scores about 2 * (cells per sample).
double dsm_loss(const ScoreFunction& model, const std::vector<std::vector<Complex>>& batch,
                const NoiseSchedule& schedule, std::uint64_t seed);

/// Scale the sample so its max magnitude is 1; returns the factor applied
/// (1 for an all-zero sample). Training applies this to every dataset
/// sample, so models see unit-range inputs.
double scale_to_unit_max(std::vector<Complex>& sample);

struct OptConfig {
  int steps = 2000;
  int batch = 4;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Train a fresh model of the given role on merged k-space frames.
/// Deterministic given (dataset, configs, seed); per-step losses land in the
/// model's loss curve. Throws Diverged if the loss leaves the finite range.
ScoreModel train(const std::vector<std::vector<Complex>>& dataset, int nx, int ny,
                 ScoreRole role, const NoiseSchedule& schedule, const ModelArch& arch,
                 const OptConfig& opt, std::uint64_t seed);

/// Continue training an existing model on a new dataset (used to adapt a
/// cohort model to one subject's merged frames). The role of the result is
/// `role`; everything else carries over.
ScoreModel train_from(const ScoreModel& init, ScoreRole role,
                      const std::vector<std::vector<Complex>>& dataset, const OptConfig& opt,
                      std::uint64_t seed);

}  // namespace cinediff
