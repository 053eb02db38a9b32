#include "cinediff/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <vector>

namespace cinediff {

namespace {

/// FFTW plans are reused across calls; creation and the shared planner are
/// guarded because the planner is not thread-safe. Plans are created with
/// FFTW_UNALIGNED so they can execute on any caller buffer via the
/// new-array interface.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(int nx, int ny, int sign) {
    std::lock_guard<std::mutex> lock(mutex_);
    const Key key{nx, ny, sign};
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;

    std::vector<fftw_complex> dummy(static_cast<std::size_t>(nx) * ny);
    // n0 is the slow axis: rows are y in the [y][x] layout.
    fftw_plan plan = fftw_plan_dft_2d(ny, nx, dummy.data(), dummy.data(), sign,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  struct Key {
    int nx, ny, sign;
    bool operator<(const Key& o) const {
      if (nx != o.nx) return nx < o.nx;
      if (ny != o.ny) return ny < o.ny;
      return sign < o.sign;
    }
  };

  PlanCache() = default;
  std::mutex mutex_;
  std::map<Key, fftw_plan> plans_;
};

void check_frame(std::span<const Complex> in, std::span<Complex> out, int nx, int ny) {
  if (nx <= 0 || ny <= 0) {
    throw Error(ErrorKind::DegenerateShape, "frame dimensions must be positive");
  }
  const std::size_t n = static_cast<std::size_t>(nx) * ny;
  if (in.size() != n || out.size() != n) {
    throw Error(ErrorKind::ShapeMismatch, "frame buffer size does not match nx*ny");
  }
}

/// Centered transform: ifftshift, FFT with the given sign, fftshift, then
/// scale by 1/sqrt(nx*ny). Both fft2c and ifft2c share this structure.
void centered_transform(std::span<const Complex> in, std::span<Complex> out, int nx, int ny,
                        int sign) {
  check_frame(in, out, nx, ny);
  const std::size_t n = static_cast<std::size_t>(nx) * ny;
  const int hx = nx / 2;
  const int hy = ny / 2;

  std::vector<Complex> work(n);
  for (int y = 0; y < ny; ++y) {
    const int sy = (y + hy) % ny;  // ifftshift source row
    for (int x = 0; x < nx; ++x) {
      const int sx = (x + hx) % nx;
      work[static_cast<std::size_t>(y) * nx + x] = in[static_cast<std::size_t>(sy) * nx + sx];
    }
  }

  fftw_plan plan = PlanCache::instance().get(nx, ny, sign);
  auto* buf = reinterpret_cast<fftw_complex*>(work.data());
  fftw_execute_dft(plan, buf, buf);

  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (int y = 0; y < ny; ++y) {
    const int sy = (y + ny - hy) % ny;  // fftshift source row
    for (int x = 0; x < nx; ++x) {
      const int sx = (x + nx - hx) % nx;
      out[static_cast<std::size_t>(y) * nx + x] =
          work[static_cast<std::size_t>(sy) * nx + sx] * scale;
    }
  }
}

}  // namespace

void fft2c_frame(std::span<const Complex> in, std::span<Complex> out, int nx, int ny) {
  centered_transform(in, out, nx, ny, FFTW_FORWARD);
}

void ifft2c_frame(std::span<const Complex> in, std::span<Complex> out, int nx, int ny) {
  centered_transform(in, out, nx, ny, FFTW_BACKWARD);
}

DynamicSeries fft2c(const DynamicSeries& series) {
  validate(series).require();
  if (series.domain != Domain::Image) {
    throw Error(ErrorKind::DomainMismatch, "fft2c expects an image-domain series");
  }
  DynamicSeries out(series.nx, series.ny, series.nt, Domain::KSpace);
  for (int t = 0; t < series.nt; ++t) {
    fft2c_frame(series.frame(t), out.frame(t), series.nx, series.ny);
  }
  return out;
}

DynamicSeries ifft2c(const DynamicSeries& series) {
  validate(series).require();
  if (series.domain != Domain::KSpace) {
    throw Error(ErrorKind::DomainMismatch, "ifft2c expects a k-space series");
  }
  DynamicSeries out(series.nx, series.ny, series.nt, Domain::Image);
  for (int t = 0; t < series.nt; ++t) {
    ifft2c_frame(series.frame(t), out.frame(t), series.nx, series.ny);
  }
  return out;
}

}  // namespace cinediff
