#pragma once

#include <filesystem>
#include <memory>
#include <vector>

#include "cinediff/schedule.hpp"
#include "cinediff/score.hpp"

namespace cinediff {

namespace detail {
template <typename T>
class ConvNet;
struct ConvLayerSpec;
}  // namespace detail

/// Layer descriptor mirrored into checkpoints: (in, out, kernel, dilation)
/// per convolution. First layer consumes 3 channels (real, imaginary, noise
/// embedding); last layer emits 2 (real and imaginary score numerators).
struct ConvSpec {
  int in = 0;
  int out = 0;
  int kernel = 3;
  int dilation = 1;
};

struct ModelArch {
  std::vector<ConvSpec> layers;

  /// Four-layer dilated stack (3->16->16->16->2, dilations 1,2,4,1): a 17x17
  /// receptive field at desk-scale cost.
  static ModelArch standard();
};

/// Trained noise-conditional score model over fixed-size complex frames.
///
/// The network sees [Re(x), Im(x)] scaled by 1/sqrt(1+sigma^2) plus a
/// constant noise-embedding channel, and predicts f with score = f/sigma.
/// A freshly created model has a zeroed last layer, so its score (and thus
/// its denoising-score-matching loss) starts at the zero-score baseline.
///
/// Checkpoints: binary, magic "GLM1", role tag, schedule, architecture with
/// frame shape, float32 parameter blob; save/load round-trips exactly.
class ScoreModel : public ScoreFunction {
 public:
  ScoreModel(ScoreRole role, NoiseSchedule schedule, ModelArch arch, int nx, int ny,
             std::uint64_t init_seed);
  ScoreModel(const ScoreModel& other);
  ScoreModel& operator=(const ScoreModel& other);
  ScoreModel(ScoreModel&&) noexcept;
  ScoreModel& operator=(ScoreModel&&) noexcept;
  ~ScoreModel() override;

  /// Evaluates grad_x log p_sigma(x). Sigma outside the training schedule is
  /// clamped (a warning is emitted once per model).
  void score(std::span<const Complex> x, double sigma, std::span<Complex> out) const override;
  ScoreRole role() const override { return role_; }

  const NoiseSchedule& schedule() const { return schedule_; }
  const ModelArch& arch() const { return arch_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }

  void save(const std::filesystem::path& path) const;
  static ScoreModel load(const std::filesystem::path& path);

  /// Per-step training losses recorded by train().
  const std::vector<double>& loss_curve() const { return loss_curve_; }

 private:
  friend detail::ConvNet<float>& model_net(ScoreModel& model);
  friend const detail::ConvNet<float>& model_net(const ScoreModel& model);
  friend std::vector<double>& model_loss_curve(ScoreModel& model);

  ScoreRole role_;
  NoiseSchedule schedule_;
  ModelArch arch_;
  int nx_ = 0;
  int ny_ = 0;
  std::unique_ptr<detail::ConvNet<float>> net_;
  std::vector<double> loss_curve_;
  mutable bool warned_clamp_ = false;
};

/// Training-internal access to the underlying network.
detail::ConvNet<float>& model_net(ScoreModel& model);
const detail::ConvNet<float>& model_net(const ScoreModel& model);
std::vector<double>& model_loss_curve(ScoreModel& model);

}  // namespace cinediff
