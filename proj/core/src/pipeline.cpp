#include "cinediff/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>

#include "cinediff/fft.hpp"

namespace cinediff {

namespace {

double norm2(std::span<const Complex> v) {
  double s = 0.0;
  for (const auto& c : v) s += c.real() * c.real() + c.imag() * c.imag();
  return std::sqrt(s);
}

std::string phase_label(const char* label, const char* step) {
  std::string out(label);
  if (!out.empty()) out += "-";
  out += step;
  return out;
}

DynamicSeries to_image(const DynamicSeries& series) {
  return series.domain == Domain::Image ? series : ifft2c(series);
}

std::vector<double> all_magnitudes(const DynamicSeries& image) {
  std::vector<double> mags(image.size());
  for (std::size_t i = 0; i < image.size(); ++i) mags[i] = std::abs(image.data[i]);
  return mags;
}

/// One frame's predictor + J correctors at level t, mirroring sample_level's
/// noise keys exactly while surfacing every sub-step to the observer.
std::vector<Complex> run_frame_level(std::span<const Complex> x, const ScoreFunction& model,
                                     int t, const SamplerConfig& sc, std::uint64_t frame,
                                     std::uint64_t pred_tag, std::uint64_t corr_tag,
                                     const char* label, PipelinePhase pred_phase,
                                     PipelinePhase corr_phase, const ReconHooks& hooks) {
  const double sigma_lo = sc.schedule.sigma(t);
  const double sigma_hi = (t + 1 < sc.T) ? sc.schedule.sigma(t + 1) : sigma_lo;

  NoiseKey pkey{sc.seed, pred_tag, static_cast<std::uint64_t>(t), 0, frame};
  std::vector<Complex> cur = predictor_step(x, model, sigma_lo, sigma_hi, pkey);
  if (hooks.sampler_trace) {
    hooks.sampler_trace->push_back(
        {t, sigma_lo, phase_label(label, "predictor"), frame, norm2(cur), 0.0, 0.0});
  }
  if (hooks.observer) hooks.observer(pred_phase, t, static_cast<int>(frame), cur);

  for (int j = 0; j < sc.J; ++j) {
    NoiseKey ckey{sc.seed, corr_tag, static_cast<std::uint64_t>(t),
                  static_cast<std::uint64_t>(j), frame};
    CorrectorResult step = corrector_step(cur, model, sigma_lo, sc.r, ckey);
    cur = std::move(step.x);
    if (hooks.sampler_trace) {
      hooks.sampler_trace->push_back({t, sigma_lo, phase_label(label, "corrector"), frame,
                                      norm2(cur), step.score_norm, step.eps});
    }
    if (hooks.observer) hooks.observer(corr_phase, t, static_cast<int>(frame), cur);
  }
  return cur;
}

DynamicSeries unscaled_copy(const DynamicSeries& k, const std::vector<double>& scale) {
  DynamicSeries out = k;
  for (int t = 0; t < out.nt; ++t) {
    const double inv = 1.0 / scale[static_cast<std::size_t>(t)];
    for (auto& v : out.frame(t)) v *= inv;
  }
  return out;
}

struct SeriesQuality {
  double psnr = 0.0;
  double mse = 0.0;
};

SeriesQuality whole_series_quality(const DynamicSeries& recon_k,
                                   const std::vector<double>& scale,
                                   const std::vector<double>& truth_mags, double truth_range) {
  const DynamicSeries image = ifft2c(unscaled_copy(recon_k, scale));
  const std::vector<double> mags = all_magnitudes(image);
  MetricConfig mc;
  mc.data_range = truth_range;
  SeriesQuality q;
  q.mse = mse(mags, truth_mags);
  q.psnr = psnr(mags, truth_mags, mc);
  return q;
}

double sample_std(std::span<const double> values, double mean) {
  if (values.size() < 2) return 0.0;
  double s = 0.0;
  for (double v : values) s += (v - mean) * (v - mean);
  return std::sqrt(s / static_cast<double>(values.size() - 1));
}

std::ofstream open_csv(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorKind::IoFailure, "cannot open " + path.string() + " for writing");
  }
  return out;
}

}  // namespace

const char* to_string(ReconMode mode) {
  return mode == ReconMode::GLDM ? "gldm" : "gm";
}

const char* to_string(PipelinePhase phase) {
  switch (phase) {
    case PipelinePhase::GmPredictor: return "gm-predictor";
    case PipelinePhase::GmCorrector: return "gm-corrector";
    case PipelinePhase::LmPredictor: return "lm-predictor";
    case PipelinePhase::LmCorrector: return "lm-corrector";
    case PipelinePhase::LowRank: return "lowrank";
    case PipelinePhase::DataConsistency: return "dc";
    case PipelinePhase::FinalDc: return "final-dc";
  }
  return "unknown";
}

ReconConfig ReconConfig::defaults() {
  ReconConfig config;
  config.sampler.T = 300;
  config.sampler.J = 1;
  config.sampler.r = 0.075;
  config.sampler.schedule = NoiseSchedule::geometric(0.01, 4.0, 300);
  config.lowrank = LowRankConfig{};
  config.dc = DCConfig{};
  config.mode = ReconMode::GLDM;
  return config;
}

std::pair<DynamicSeries, ReconReport> reconstruct(const DynamicSeries& y,
                                                  const SamplingMask& mask,
                                                  const ScoreFunction& gm,
                                                  const ScoreFunction* lm,
                                                  const ReconConfig& config,
                                                  const ReconHooks& hooks) {
  const auto started = std::chrono::steady_clock::now();

  validate(y).require();
  validate_compatible(y, mask).require();
  if (y.domain != Domain::KSpace) {
    throw Error(ErrorKind::DomainMismatch, "measurements must be in k-space");
  }
  if (gm.role() == ScoreRole::Local) {
    throw Error(ErrorKind::ModelRoleMismatch, "global slot holds a local-role model");
  }
  if (config.mode == ReconMode::GLDM) {
    if (!lm) throw Error(ErrorKind::MissingModel, "GLDM mode needs a local model");
    if (lm->role() == ScoreRole::Global) {
      throw Error(ErrorKind::ModelRoleMismatch, "local slot holds a global-role model");
    }
  }

  SamplerConfig sc = config.sampler;
  sc.seed = config.seed;
  validate(sc).require();

  const int nt = y.nt;
  const std::size_t cells = y.frame_size();

  // Match training: every frame enters the sampler scaled to unit max
  // magnitude, and leaves through the inverse scale.
  std::vector<double> scale(static_cast<std::size_t>(nt), 1.0);
  DynamicSeries ys = y;
  for (int t = 0; t < nt; ++t) {
    double peak = 0.0;
    for (const auto& v : ys.frame(t)) peak = std::max(peak, std::abs(v));
    const double s = peak > 0.0 ? 1.0 / peak : 1.0;
    scale[static_cast<std::size_t>(t)] = s;
    for (auto& v : ys.frame(t)) v *= s;
  }

  std::optional<DynamicSeries> truth_image;
  std::vector<double> truth_mags;
  double truth_range = 1.0;
  if (hooks.truth) {
    if (hooks.truth->nx != y.nx || hooks.truth->ny != y.ny || hooks.truth->nt != y.nt) {
      throw Error(ErrorKind::ShapeMismatch, "truth shape differs from measurements");
    }
    truth_image = to_image(*hooks.truth);
    truth_mags = all_magnitudes(*truth_image);
    truth_range = *std::max_element(truth_mags.begin(), truth_mags.end());
    if (truth_range <= 0.0) truth_range = 1.0;
  }

  ReconReport report;

  DynamicSeries x(y.nx, y.ny, nt, Domain::KSpace);
  for (int t = 0; t < nt; ++t) {
    std::vector<Complex> init = sample_init(sc, cells, static_cast<std::uint64_t>(t));
    std::copy(init.begin(), init.end(), x.frame(t).begin());
  }

  for (int t = sc.T - 1; t >= 0; --t) {
    for (int f = 0; f < nt; ++f) {
      std::vector<Complex> cur =
          run_frame_level(x.frame(f), gm, t, sc, static_cast<std::uint64_t>(f),
                          noise_tag::kGmPredictor, noise_tag::kGmCorrector, "gm",
                          PipelinePhase::GmPredictor, PipelinePhase::GmCorrector, hooks);
      std::copy(cur.begin(), cur.end(), x.frame(f).begin());
    }
    if (config.mode == ReconMode::GLDM) {
      for (int f = 0; f < nt; ++f) {
        std::vector<Complex> cur =
            run_frame_level(x.frame(f), *lm, t, sc, static_cast<std::uint64_t>(f),
                            noise_tag::kLmPredictor, noise_tag::kLmCorrector, "lm",
                            PipelinePhase::LmPredictor, PipelinePhase::LmCorrector, hooks);
        std::copy(cur.begin(), cur.end(), x.frame(f).begin());
      }
    }

    x = lowrank_project(x, config.lowrank);
    if (hooks.observer) hooks.observer(PipelinePhase::LowRank, t, -1, x.data);

    x = data_consistency(x, ys, mask, config.dc.lambda);
    if (hooks.observer) hooks.observer(PipelinePhase::DataConsistency, t, -1, x.data);

    if (truth_image) {
      const SeriesQuality q = whole_series_quality(x, scale, truth_mags, truth_range);
      report.trace.push_back({t, sc.schedule.sigma(t), q.psnr, q.mse});
    }
  }

  // Measured cells leave exactly as acquired regardless of lambda.
  x = data_consistency(x, ys, mask, std::numeric_limits<double>::infinity());
  if (hooks.observer) hooks.observer(PipelinePhase::FinalDc, 0, -1, x.data);

  DynamicSeries out = unscaled_copy(x, scale);

  if (truth_image) {
    MetricConfig mc;
    mc.data_range = truth_range;
    const DynamicSeries recon_image = ifft2c(out);
    double sum_psnr = 0.0, sum_ssim = 0.0, sum_mse = 0.0;
    for (int t = 0; t < nt; ++t) {
      const std::vector<double> a = magnitude_frame(recon_image, t);
      const std::vector<double> b = magnitude_frame(*truth_image, t);
      FrameMetrics fm;
      fm.psnr = psnr(a, b, mc);
      fm.ssim = ssim(a, b, y.nx, y.ny, mc);
      fm.mse = mse(a, b);
      report.per_frame.push_back(fm);
      sum_psnr += fm.psnr;
      sum_ssim += fm.ssim;
      sum_mse += fm.mse;
    }
    report.average.psnr = sum_psnr / nt;
    report.average.ssim = sum_ssim / nt;
    report.average.mse = sum_mse / nt;
  }

  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return {std::move(out), std::move(report)};
}

ReconReport evaluate_run(const DynamicSeries& recon, const DynamicSeries& truth) {
  validate(recon).require();
  validate(truth).require();
  if (recon.nx != truth.nx || recon.ny != truth.ny || recon.nt != truth.nt) {
    throw Error(ErrorKind::ShapeMismatch, "reconstruction and truth shapes differ");
  }

  const DynamicSeries a = to_image(recon);
  const DynamicSeries b = to_image(truth);

  MetricConfig mc;
  mc.data_range = max_magnitude(b);
  if (mc.data_range <= 0.0) mc.data_range = 1.0;

  ReconReport report;
  double sum_psnr = 0.0, sum_ssim = 0.0, sum_mse = 0.0;
  for (int t = 0; t < a.nt; ++t) {
    const std::vector<double> ma = magnitude_frame(a, t);
    const std::vector<double> mb = magnitude_frame(b, t);
    FrameMetrics fm;
    fm.psnr = psnr(ma, mb, mc);
    fm.ssim = ssim(ma, mb, a.nx, a.ny, mc);
    fm.mse = mse(ma, mb);
    report.per_frame.push_back(fm);
    sum_psnr += fm.psnr;
    sum_ssim += fm.ssim;
    sum_mse += fm.mse;
  }
  report.average.psnr = sum_psnr / a.nt;
  report.average.ssim = sum_ssim / a.nt;
  report.average.mse = sum_mse / a.nt;
  return report;
}

std::vector<AblateRow> ablate(std::span<const AblateCase> cases,
                              std::span<const AblateVariant> variants) {
  if (cases.empty()) throw Error(ErrorKind::EmptyDataset, "ablation needs at least one case");

  std::vector<AblateRow> rows;
  for (const auto& variant : variants) {
    if (!variant.gm) throw Error(ErrorKind::MissingModel, "variant lacks a global model");
    std::vector<double> psnrs, ssims, mse4s;
    for (const auto& item : cases) {
      if (!item.y || !item.mask || !item.truth) {
        throw Error(ErrorKind::InvalidArgument, "ablation case is missing data");
      }
      ReconConfig config = variant.config;
      config.mode = variant.mode;
      ReconHooks hooks;
      hooks.truth = item.truth;
      auto [recon, report] = reconstruct(*item.y, *item.mask, *variant.gm, variant.lm,
                                         config, hooks);
      psnrs.push_back(report.average.psnr);
      ssims.push_back(report.average.ssim);
      mse4s.push_back(report.average.mse * 1e4);
    }

    AblateRow row;
    row.variant = variant.name;
    row.n = static_cast<int>(cases.size());
    const double inv = 1.0 / static_cast<double>(cases.size());
    for (double v : psnrs) row.psnr_mean += v * inv;
    for (double v : ssims) row.ssim_mean += v * inv;
    for (double v : mse4s) row.mse4_mean += v * inv;
    row.psnr_std = sample_std(psnrs, row.psnr_mean);
    row.ssim_std = sample_std(ssims, row.ssim_mean);
    row.mse4_std = sample_std(mse4s, row.mse4_mean);
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_ablate_csv(const std::filesystem::path& path, std::span<const AblateRow> rows) {
  std::ofstream out = open_csv(path);
  out << "variant,n,psnr_mean,psnr_std,ssim_mean,ssim_std,mse_x1e4_mean,mse_x1e4_std\n";
  out << std::fixed << std::setprecision(6);
  for (const auto& row : rows) {
    out << row.variant << ',' << row.n << ',' << row.psnr_mean << ',' << row.psnr_std << ','
        << row.ssim_mean << ',' << row.ssim_std << ',' << row.mse4_mean << ','
        << row.mse4_std << '\n';
  }
  if (!out) throw Error(ErrorKind::IoFailure, "failed writing " + path.string());
}

void write_trace_csv(const std::filesystem::path& path, std::span<const TraceRow> rows) {
  std::ofstream out = open_csv(path);
  out << "level,sigma,psnr,mse\n";
  out << std::setprecision(10);
  for (const auto& row : rows) {
    out << row.level << ',' << row.sigma << ',' << row.psnr << ',' << row.mse << '\n';
  }
  if (!out) throw Error(ErrorKind::IoFailure, "failed writing " + path.string());
}

void write_sampler_trace_csv(const std::filesystem::path& path,
                             std::span<const SamplerStepTrace> rows) {
  std::ofstream out = open_csv(path);
  out << "level,sigma,phase,site,x_norm,score_norm,eps\n";
  out << std::setprecision(10);
  for (const auto& row : rows) {
    out << row.level << ',' << row.sigma << ',' << row.phase << ',' << row.site << ','
        << row.x_norm << ',' << row.score_norm << ',' << row.eps << '\n';
  }
  if (!out) throw Error(ErrorKind::IoFailure, "failed writing " + path.string());
}

std::vector<MetricsRow> report_rows(const std::string& series_name, const ReconReport& report) {
  std::vector<MetricsRow> rows;
  for (std::size_t t = 0; t < report.per_frame.size(); ++t) {
    const auto& fm = report.per_frame[t];
    rows.push_back({series_name, static_cast<int>(t), fm.psnr, fm.ssim, fm.mse});
  }
  rows.push_back({series_name, -1, report.average.psnr, report.average.ssim,
                  report.average.mse});
  return rows;
}

}  // namespace cinediff
