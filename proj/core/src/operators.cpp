#include "cinediff/operators.hpp"

#include "cinediff/fft.hpp"

namespace cinediff {

namespace {

void check_model(const ForwardModel& model, const DynamicSeries& series) {
  validate_compatible(series, model.mask).require();
  if (model.sens.nc != 1) {
    throw Error(ErrorKind::InvalidArgument, "only single-coil models are supported");
  }
  if (model.sens.nx != series.nx || model.sens.ny != series.ny) {
    throw Error(ErrorKind::ShapeMismatch, "sensitivity map shape does not match series");
  }
}

}  // namespace

ForwardModel ForwardModel::single_coil(SamplingMask mask) {
  ForwardModel m;
  m.sens = CoilSensitivities::identity(mask.nx, mask.ny);
  m.mask = std::move(mask);
  return m;
}

DynamicSeries apply_forward(const ForwardModel& model, const DynamicSeries& image) {
  check_model(model, image);
  if (image.domain != Domain::Image) {
    throw Error(ErrorKind::DomainMismatch, "forward model expects an image-domain series");
  }

  DynamicSeries weighted = image;
  const std::size_t fs = image.frame_size();
  for (int t = 0; t < image.nt; ++t) {
    auto frame = weighted.frame(t);
    for (std::size_t i = 0; i < fs; ++i) frame[i] *= model.sens.values[i];
  }

  DynamicSeries k = fft2c(weighted);
  for (std::size_t i = 0; i < k.data.size(); ++i) {
    if (!model.mask.acquired[i]) k.data[i] = Complex(0.0, 0.0);
  }
  return k;
}

DynamicSeries apply_adjoint(const ForwardModel& model, const DynamicSeries& kspace) {
  check_model(model, kspace);
  if (kspace.domain != Domain::KSpace) {
    throw Error(ErrorKind::DomainMismatch, "adjoint expects a k-space series");
  }

  DynamicSeries masked = kspace;
  for (std::size_t i = 0; i < masked.data.size(); ++i) {
    if (!model.mask.acquired[i]) masked.data[i] = Complex(0.0, 0.0);
  }

  DynamicSeries image = ifft2c(masked);
  const std::size_t fs = image.frame_size();
  for (int t = 0; t < image.nt; ++t) {
    auto frame = image.frame(t);
    for (std::size_t i = 0; i < fs; ++i) frame[i] *= std::conj(model.sens.values[i]);
  }
  return image;
}

DynamicSeries zero_filled(const ForwardModel& model, const DynamicSeries& kspace) {
  return apply_adjoint(model, kspace);
}

}  // namespace cinediff
