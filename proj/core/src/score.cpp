#include "cinediff/score.hpp"

#include <cmath>

#include "cinediff/error.hpp"

namespace cinediff {

const char* to_string(ScoreRole role) {
  switch (role) {
    case ScoreRole::Global: return "global";
    case ScoreRole::Local: return "local";
    case ScoreRole::Any: return "any";
  }
  return "unknown";
}

std::vector<Complex> ScoreFunction::score_of(std::span<const Complex> x, double sigma) const {
  std::vector<Complex> out(x.size());
  score(x, sigma, out);
  return out;
}

AnalyticGaussianScore::AnalyticGaussianScore(std::vector<Complex> mean, double variance)
    : mean_(std::move(mean)), variance_(variance) {
  if (!(variance_ > 0.0) || !std::isfinite(variance_)) {
    throw Error(ErrorKind::InvalidArgument, "variance must be finite and positive");
  }
  if (mean_.empty()) {
    throw Error(ErrorKind::DegenerateShape, "mean must be non-empty");
  }
}

void AnalyticGaussianScore::score(std::span<const Complex> x, double sigma,
                                  std::span<Complex> out) const {
  if (x.size() != mean_.size() || out.size() != mean_.size()) {
    throw Error(ErrorKind::ShapeMismatch, "score input size does not match the prior mean");
  }
  if (!(sigma > 0.0)) {
    throw Error(ErrorKind::NonPositiveSigma, "score requires sigma > 0");
  }
  const double denom = variance_ + sigma * sigma;
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = (mean_[i] - x[i]) / denom;
  }
}

void ZeroScore::score(std::span<const Complex> x, double sigma, std::span<Complex> out) const {
  if (x.size() != out.size()) {
    throw Error(ErrorKind::ShapeMismatch, "score output size does not match input");
  }
  if (!(sigma > 0.0)) {
    throw Error(ErrorKind::NonPositiveSigma, "score requires sigma > 0");
  }
  for (auto& v : out) v = Complex(0.0, 0.0);
}

}  // namespace cinediff
