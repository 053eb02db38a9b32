#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "cinediff/types.hpp"

namespace cinediff {

struct MetricConfig {
  /// Peak value for PSNR and SSIM constants. Callers default this to the
  /// ground-truth series' max magnitude; it must be positive.
  double data_range = 1.0;
  int window = 11;
  double gaussian_sd = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double psnr_cap = 100.0;
};

/// Mean squared difference between magnitude images.
double mse(std::span<const double> a, std::span<const double> b);

/// 10*log10(data_range^2 / mse), capped at psnr_cap when mse == 0.
double psnr(std::span<const double> a, std::span<const double> b, const MetricConfig& config);

/// Mean structural similarity with an 11x11 Gaussian window (sd 1.5) and
/// stability constants (k1*L)^2, (k2*L)^2. The window must fit the image.
double ssim(std::span<const double> a, std::span<const double> b, int nx, int ny,
            const MetricConfig& config);

std::vector<double> magnitude_frame(const DynamicSeries& series, int t);
double max_magnitude(const DynamicSeries& series);

/// Table row; frame == -1 marks a per-series average row. mse is stored
/// unscaled and written to CSV in 1e-4 units.
struct MetricsRow {
  std::string series;
  int frame = 0;
  double psnr = 0.0;
  double ssim = 0.0;
  double mse = 0.0;
};

/// Columns: series, frame, psnr, ssim, mse_x1e4; average rows carry "avg" in
/// the frame column.
void write_metrics_csv(const std::filesystem::path& path, std::span<const MetricsRow> rows);

}  // namespace cinediff
