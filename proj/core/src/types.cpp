#include "cinediff/types.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace cinediff {

const char* to_string(Domain domain) {
  return domain == Domain::Image ? "image" : "kspace";
}

DynamicSeries::DynamicSeries(int nx_, int ny_, int nt_, Domain domain_)
    : nx(nx_), ny(ny_), nt(nt_), domain(domain_) {
  if (nx <= 0 || ny <= 0 || nt <= 0) {
    std::ostringstream msg;
    msg << "series dimensions must be positive, got " << nx_ << "x" << ny_ << "x" << nt_;
    throw Error(ErrorKind::DegenerateShape, msg.str());
  }
  data.assign(size(), Complex(0.0, 0.0));
}

SamplingMask::SamplingMask(int nx_, int ny_, int nt_) : nx(nx_), ny(ny_), nt(nt_) {
  if (nx <= 0 || ny <= 0 || nt <= 0) {
    std::ostringstream msg;
    msg << "mask dimensions must be positive, got " << nx_ << "x" << ny_ << "x" << nt_;
    throw Error(ErrorKind::DegenerateShape, msg.str());
  }
  acquired.assign(size(), 0);
}

bool SamplingMask::line_acquired(int t, int y) const {
  for (int x = 0; x < nx; ++x) {
    if (at(t, y, x)) return true;
  }
  return false;
}

std::size_t SamplingMask::count_acquired() const {
  std::size_t n = 0;
  for (auto v : acquired) n += (v != 0);
  return n;
}

double SamplingMask::realized_acceleration() const {
  const std::size_t n = count_acquired();
  if (n == 0) return std::numeric_limits<double>::infinity();
  return static_cast<double>(size()) / static_cast<double>(n);
}

CoilSensitivities CoilSensitivities::identity(int nx, int ny) {
  CoilSensitivities s;
  s.nx = nx;
  s.ny = ny;
  s.nc = 1;
  s.values.assign(static_cast<std::size_t>(nx) * ny, Complex(1.0, 0.0));
  return s;
}

bool CoilSensitivities::is_identity() const {
  if (nc != 1) return false;
  for (const auto& v : values) {
    if (v != Complex(1.0, 0.0)) return false;
  }
  return true;
}

Result validate(const DynamicSeries& series) {
  if (series.nx <= 0 || series.ny <= 0 || series.nt <= 0) {
    return Result::failure(ErrorKind::DegenerateShape, "series has non-positive dimension");
  }
  if (series.data.size() != series.size()) {
    std::ostringstream msg;
    msg << "series buffer holds " << series.data.size() << " values, shape implies "
        << series.size();
    return Result::failure(ErrorKind::ShapeMismatch, msg.str());
  }
  for (std::size_t i = 0; i < series.data.size(); ++i) {
    const Complex& v = series.data[i];
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      std::ostringstream msg;
      msg << "non-finite value at flat index " << i;
      return Result::failure(ErrorKind::NonFiniteValue, msg.str());
    }
  }
  return Result::success();
}

Result validate(const SamplingMask& mask) {
  if (mask.nx <= 0 || mask.ny <= 0 || mask.nt <= 0) {
    return Result::failure(ErrorKind::DegenerateShape, "mask has non-positive dimension");
  }
  if (mask.acquired.size() != mask.size()) {
    std::ostringstream msg;
    msg << "mask buffer holds " << mask.acquired.size() << " values, shape implies "
        << mask.size();
    return Result::failure(ErrorKind::ShapeMismatch, msg.str());
  }
  for (std::size_t i = 0; i < mask.acquired.size(); ++i) {
    if (mask.acquired[i] > 1) {
      std::ostringstream msg;
      msg << "mask value at flat index " << i << " is not 0/1";
      return Result::failure(ErrorKind::InvalidArgument, msg.str());
    }
  }
  return Result::success();
}

Result validate_compatible(const DynamicSeries& series, const SamplingMask& mask) {
  if (auto r = validate(series); !r) return r;
  if (auto r = validate(mask); !r) return r;
  if (series.nx != mask.nx || series.ny != mask.ny || series.nt != mask.nt) {
    std::ostringstream msg;
    msg << "series " << series.nx << "x" << series.ny << "x" << series.nt << " vs mask "
        << mask.nx << "x" << mask.ny << "x" << mask.nt;
    return Result::failure(ErrorKind::ShapeMismatch, msg.str());
  }
  return Result::success();
}

}  // namespace cinediff
