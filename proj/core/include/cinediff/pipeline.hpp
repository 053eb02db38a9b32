#pragma once

#include <functional>
#include <utility>

#include "cinediff/dc.hpp"
#include "cinediff/lowrank.hpp"
#include "cinediff/metrics.hpp"
#include "cinediff/sampler.hpp"
#include "cinediff/score.hpp"

namespace cinediff {

enum class ReconMode { GLDM, GMOnly };

const char* to_string(ReconMode mode);

/// Sub-step identifiers for the order-contract instrumentation.
enum class PipelinePhase {
  GmPredictor,
  GmCorrector,
  LmPredictor,
  LmCorrector,
  LowRank,
  DataConsistency,
  FinalDc,
};

const char* to_string(PipelinePhase phase);

struct ReconConfig {
  SamplerConfig sampler;
  LowRankConfig lowrank;
  DCConfig dc;
  ReconMode mode = ReconMode::GLDM;
  /// Trajectory seed; overrides sampler.seed inside reconstruct().
  std::uint64_t seed = 0;

  /// Reconstruction-phase defaults: geometric 0.01..4 ladder consumed by
  /// T=300 outer steps, J=1, r=0.075, Casorati rank-3 projection, hard DC.
  static ReconConfig defaults();
};

struct FrameMetrics {
  double psnr = 0.0;
  double ssim = 0.0;
  double mse = 0.0;
};

struct TraceRow {
  int level = 0;
  double sigma = 0.0;
  double psnr = 0.0;
  double mse = 0.0;
};

struct ReconReport {
  std::vector<FrameMetrics> per_frame;
  FrameMetrics average;
  /// Per-level quality against truth, recorded after each level's DC step;
  /// empty when no truth was supplied.
  std::vector<TraceRow> trace;
  double wall_seconds = 0.0;
};

/// Observer fires after each sub-step with the state it produced: the
/// updated frame for per-frame phases (frame >= 0), the whole series data
/// for LowRank/DataConsistency/FinalDc (frame == -1).
using PipelineObserver =
    std::function<void(PipelinePhase, int level, int frame, std::span<const Complex>)>;

struct ReconHooks {
  PipelineObserver observer;
  std::vector<SamplerStepTrace>* sampler_trace = nullptr;
  /// Ground truth (image or k-space domain) enabling the per-level trace
  /// and the report metrics.
  const DynamicSeries* truth = nullptr;
};

/// Algorithm: per outer level t = T-1..0, every frame runs the global-model
/// predictor and J correctors, then (GLDM mode) the local-model predictor
/// and J correctors on the global output; the series then passes through
/// the low-rank projection and data consistency. A final hard DC pass
/// guarantees measured cells match y exactly. Frames are normalized to unit
/// max magnitude on entry (matching training) and unscaled on exit.
std::pair<DynamicSeries, ReconReport> reconstruct(const DynamicSeries& y,
                                                  const SamplingMask& mask,
                                                  const ScoreFunction& gm,
                                                  const ScoreFunction* lm,
                                                  const ReconConfig& config,
                                                  const ReconHooks& hooks = {});

/// Magnitude-image metrics per frame plus the average row; k-space inputs
/// are transformed to image domain first. data_range is the truth's max
/// magnitude.
ReconReport evaluate_run(const DynamicSeries& recon, const DynamicSeries& truth);

struct AblateCase {
  std::string name;
  const DynamicSeries* y = nullptr;
  const SamplingMask* mask = nullptr;
  const DynamicSeries* truth = nullptr;
};

struct AblateVariant {
  std::string name;
  ReconMode mode = ReconMode::GLDM;
  const ScoreFunction* gm = nullptr;
  const ScoreFunction* lm = nullptr;
  ReconConfig config;
};

struct AblateRow {
  std::string variant;
  int n = 0;
  double psnr_mean = 0.0, psnr_std = 0.0;
  double ssim_mean = 0.0, ssim_std = 0.0;
  double mse4_mean = 0.0, mse4_std = 0.0;
};

/// Run every variant over every case under the variant's config (callers
/// keep seeds identical across variants for paired comparisons); aggregates
/// the per-series average metrics as mean and sample standard deviation.
std::vector<AblateRow> ablate(std::span<const AblateCase> cases,
                              std::span<const AblateVariant> variants);

void write_ablate_csv(const std::filesystem::path& path, std::span<const AblateRow> rows);
void write_trace_csv(const std::filesystem::path& path, std::span<const TraceRow> rows);
void write_sampler_trace_csv(const std::filesystem::path& path,
                             std::span<const SamplerStepTrace> rows);

/// Report rows for the metrics CSV: one row per frame plus the average row.
std::vector<MetricsRow> report_rows(const std::string& series_name, const ReconReport& report);

}  // namespace cinediff
