#include "cinediff/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace cinediff {

namespace {

void check_pair(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) {
    throw Error(ErrorKind::ShapeMismatch, "magnitude images must share a non-empty shape");
  }
}

/// Separable Gaussian blur, reflect boundary. With the standard 11-window
/// crop the boundary mode never reaches the reported region; it is fixed
/// here only for determinism.
void gaussian_blur(const std::vector<double>& in, std::vector<double>& out, int nx, int ny,
                   const std::vector<double>& kernel) {
  const int radius = static_cast<int>(kernel.size() / 2);
  std::vector<double> tmp(in.size());
  auto reflect = [](int i, int n) {
    while (i < 0 || i >= n) {
      if (i < 0) i = -i - 1;
      if (i >= n) i = 2 * n - i - 1;
    }
    return i;
  };
  for (int y = 0; y < ny; ++y) {
    for (int x = 0; x < nx; ++x) {
      double s = 0.0;
      for (int k = -radius; k <= radius; ++k) {
        s += kernel[static_cast<std::size_t>(k + radius)] *
             in[static_cast<std::size_t>(y) * nx + reflect(x + k, nx)];
      }
      tmp[static_cast<std::size_t>(y) * nx + x] = s;
    }
  }
  for (int y = 0; y < ny; ++y) {
    for (int x = 0; x < nx; ++x) {
      double s = 0.0;
      for (int k = -radius; k <= radius; ++k) {
        s += kernel[static_cast<std::size_t>(k + radius)] *
             tmp[static_cast<std::size_t>(reflect(y + k, ny)) * nx + x];
      }
      out[static_cast<std::size_t>(y) * nx + x] = s;
    }
  }
}

}  // namespace

double mse(std::span<const double> a, std::span<const double> b) {
  check_pair(a, b);
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum / static_cast<double>(a.size());
}

double psnr(std::span<const double> a, std::span<const double> b, const MetricConfig& config) {
  if (!(config.data_range > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "data_range must be positive");
  }
  const double err = mse(a, b);
  if (err == 0.0) return config.psnr_cap;
  return 10.0 * std::log10(config.data_range * config.data_range / err);
}

double ssim(std::span<const double> a, std::span<const double> b, int nx, int ny,
            const MetricConfig& config) {
  check_pair(a, b);
  if (static_cast<std::size_t>(nx) * ny != a.size() || nx <= 0 || ny <= 0) {
    throw Error(ErrorKind::ShapeMismatch, "image buffer does not match nx*ny");
  }
  if (!(config.data_range > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "data_range must be positive");
  }
  if (config.window % 2 == 0 || config.window < 3) {
    throw Error(ErrorKind::InvalidArgument, "ssim window must be odd and >= 3");
  }
  if (nx < config.window || ny < config.window) {
    std::ostringstream msg;
    msg << "image " << nx << "x" << ny << " smaller than the " << config.window << "-pixel window";
    throw Error(ErrorKind::ImageTooSmall, msg.str());
  }

  const int radius = (config.window - 1) / 2;
  std::vector<double> kernel(static_cast<std::size_t>(config.window));
  double ks = 0.0;
  for (int k = -radius; k <= radius; ++k) {
    const double v = std::exp(-0.5 * (k * k) / (config.gaussian_sd * config.gaussian_sd));
    kernel[static_cast<std::size_t>(k + radius)] = v;
    ks += v;
  }
  for (auto& v : kernel) v /= ks;

  const std::size_t n = a.size();
  std::vector<double> av(a.begin(), a.end());
  std::vector<double> bv(b.begin(), b.end());
  std::vector<double> aa(n), bb(n), ab(n);
  for (std::size_t i = 0; i < n; ++i) {
    aa[i] = av[i] * av[i];
    bb[i] = bv[i] * bv[i];
    ab[i] = av[i] * bv[i];
  }

  std::vector<double> ua(n), ub(n), uaa(n), ubb(n), uab(n);
  gaussian_blur(av, ua, nx, ny, kernel);
  gaussian_blur(bv, ub, nx, ny, kernel);
  gaussian_blur(aa, uaa, nx, ny, kernel);
  gaussian_blur(bb, ubb, nx, ny, kernel);
  gaussian_blur(ab, uab, nx, ny, kernel);

  const double c1 = (config.k1 * config.data_range) * (config.k1 * config.data_range);
  const double c2 = (config.k2 * config.data_range) * (config.k2 * config.data_range);

  // Population (filter-weighted) moments; mean over the interior that full
  // windows cover.
  double total = 0.0;
  std::size_t count = 0;
  for (int y = radius; y < ny - radius; ++y) {
    for (int x = radius; x < nx - radius; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * nx + x;
      const double va = uaa[i] - ua[i] * ua[i];
      const double vb = ubb[i] - ub[i] * ub[i];
      const double vab = uab[i] - ua[i] * ub[i];
      const double num = (2.0 * ua[i] * ub[i] + c1) * (2.0 * vab + c2);
      const double den = (ua[i] * ua[i] + ub[i] * ub[i] + c1) * (va + vb + c2);
      total += num / den;
      ++count;
    }
  }
  return total / static_cast<double>(count);
}

std::vector<double> magnitude_frame(const DynamicSeries& series, int t) {
  if (t < 0 || t >= series.nt) {
    throw Error(ErrorKind::InvalidArgument, "frame index out of range");
  }
  auto frame = series.frame(t);
  std::vector<double> out(frame.size());
  for (std::size_t i = 0; i < frame.size(); ++i) out[i] = std::abs(frame[i]);
  return out;
}

double max_magnitude(const DynamicSeries& series) {
  double m = 0.0;
  for (const auto& v : series.data) m = std::max(m, std::abs(v));
  return m;
}

void write_metrics_csv(const std::filesystem::path& path, std::span<const MetricsRow> rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoFailure, "cannot open for writing: " + path.string());
  out << "series,frame,psnr,ssim,mse_x1e4\n";
  out.precision(6);
  out << std::fixed;
  for (const auto& row : rows) {
    out << row.series << ",";
    if (row.frame < 0) {
      out << "avg";
    } else {
      out << row.frame;
    }
    out << "," << row.psnr << "," << row.ssim << "," << row.mse * 1e4 << "\n";
  }
  if (!out) throw Error(ErrorKind::IoFailure, "write failed: " + path.string());
}

}  // namespace cinediff
