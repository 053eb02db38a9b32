#pragma once

#include <span>
#include <vector>

#include "cinediff/types.hpp"

namespace cinediff {

/// Which prior a model encodes: Global models are trained on a cohort,
/// Local models on the measured series being reconstructed. Any marks
/// score functions without a training provenance (analytic references).
enum class ScoreRole { Global, Local, Any };

const char* to_string(ScoreRole role);

/// A noise-conditional score: out = grad_x log p_sigma(x) evaluated on one
/// complex frame. Implementations must be deterministic in (x, sigma) and
/// must not retain state between calls.
class ScoreFunction {
 public:
  virtual ~ScoreFunction() = default;

  virtual void score(std::span<const Complex> x, double sigma, std::span<Complex> out) const = 0;
  virtual ScoreRole role() const { return ScoreRole::Any; }

  std::vector<Complex> score_of(std::span<const Complex> x, double sigma) const;
};

/// Closed-form score of an independent Gaussian prior: each cell has complex
/// mean mu_k and per-real-component variance v, so after perturbation with
/// noise level sigma the score is (mu - x) / (v + sigma^2). Ground truth for
/// sampler statistics.
class AnalyticGaussianScore : public ScoreFunction {
 public:
  AnalyticGaussianScore(std::vector<Complex> mean, double variance);

  void score(std::span<const Complex> x, double sigma, std::span<Complex> out) const override;

  const std::vector<Complex>& mean() const { return mean_; }
  double variance() const { return variance_; }

 private:
  std::vector<Complex> mean_;
  double variance_;
};

/// Identically zero score; useful as a null prior in contract tests.
class ZeroScore : public ScoreFunction {
 public:
  void score(std::span<const Complex> x, double sigma, std::span<Complex> out) const override;
};

}  // namespace cinediff
