#include "cinediff/train.hpp"

#include <cmath>
#include <sstream>

#include "cinediff/rng.hpp"
#include "conv_net.hpp"
#include "model_input.hpp"

namespace cinediff {

namespace {

constexpr std::uint64_t kPerturb = 0x70657274ULL;  // "pert"
constexpr std::uint64_t kDsmEval = 0x64736d6cULL;  // "dsml"
constexpr std::uint64_t kTrainPick = 0x7069636bULL;   // "pick"
constexpr std::uint64_t kTrainNoise = 0x7a747267ULL;  // "ztrg"

using NetF = detail::ConvNet<float>;

/// First-order adaptive-moment updates, one moment pair per parameter chunk.
class AdamState {
 public:
  AdamState(NetF& net, const OptConfig& opt) : opt_(opt) {
    net.visit_params([this](float*, float*, std::size_t n) {
      m_.emplace_back(n, 0.0f);
      v_.emplace_back(n, 0.0f);
    });
  }

  void step(NetF& net) {
    ++t_;
    const double bc1 = 1.0 - std::pow(opt_.beta1, t_);
    const double bc2 = 1.0 - std::pow(opt_.beta2, t_);
    std::size_t chunk = 0;
    net.visit_params([&](float* p, float* g, std::size_t n) {
      auto& m = m_[chunk];
      auto& v = v_[chunk];
      ++chunk;
      for (std::size_t i = 0; i < n; ++i) {
        m[i] = static_cast<float>(opt_.beta1 * m[i] + (1.0 - opt_.beta1) * g[i]);
        v[i] = static_cast<float>(opt_.beta2 * v[i] +
                                  (1.0 - opt_.beta2) * static_cast<double>(g[i]) * g[i]);
        const double mhat = m[i] / bc1;
        const double vhat = v[i] / bc2;
        p[i] -= static_cast<float>(opt_.lr * mhat / (std::sqrt(vhat) + opt_.eps));
      }
    });
  }

 private:
  OptConfig opt_;
  std::vector<std::vector<float>> m_;
  std::vector<std::vector<float>> v_;
  long t_ = 0;
};

void check_dataset(const std::vector<std::vector<Complex>>& dataset, std::size_t cells) {
  if (dataset.empty()) throw Error(ErrorKind::EmptyDataset, "dataset holds no samples");
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (dataset[i].size() != cells) {
      std::ostringstream msg;
      msg << "sample " << i << " has " << dataset[i].size() << " cells, expected " << cells;
      throw Error(ErrorKind::ShapeMismatch, msg.str());
    }
  }
}

/// Shared optimization loop: draws (sample, level, noise) per batch slot,
/// regresses the network output toward -z, and applies one optimizer step.
void run_training(ScoreModel& model, const std::vector<std::vector<Complex>>& dataset,
                  const OptConfig& opt, std::uint64_t seed) {
  const std::size_t cells = static_cast<std::size_t>(model.nx()) * model.ny();
  check_dataset(dataset, cells);
  if (opt.steps < 0 || opt.batch < 1) {
    throw Error(ErrorKind::InvalidArgument, "steps must be >= 0 and batch positive");
  }

  // Unit-max normalization puts every sample in the trained input range.
  std::vector<std::vector<Complex>> samples = dataset;
  for (auto& s : samples) scale_to_unit_max(s);

  NetF& net = model_net(model);
  const NoiseSchedule& schedule = model.schedule();
  AdamState adam(net, opt);
  auto& curve = model_loss_curve(model);
  curve.reserve(curve.size() + static_cast<std::size_t>(opt.steps));

  std::vector<Complex> noisy(cells);
  NetF::Matrix input;
  NetF::Matrix dout(2, static_cast<Eigen::Index>(cells));

  for (int step = 0; step < opt.steps; ++step) {
    net.zero_grad();
    double loss = 0.0;
    for (int b = 0; b < opt.batch; ++b) {
      Rng pick = stream({seed, kTrainPick, static_cast<std::uint64_t>(step),
                         static_cast<std::uint64_t>(b)});
      const std::size_t idx = pick.uniform_int(samples.size());
      const int level = static_cast<int>(pick.uniform_int(schedule.n_levels));
      const double sigma = schedule.sigma(level);
      Rng zrng = stream({seed, kTrainNoise, static_cast<std::uint64_t>(step),
                         static_cast<std::uint64_t>(b)});
      const auto& clean = samples[idx];

      double sample_loss = 0.0;
      {
        // Draw z, perturb, forward, and set dL/df = 2 (f + z) / batch.
        std::vector<Complex> z(cells);
        fill_gaussian(zrng, z);
        for (std::size_t i = 0; i < cells; ++i) noisy[i] = clean[i] + sigma * z[i];
        detail::build_score_input(noisy, sigma, schedule, input);
        const NetF::Matrix& f = net.forward(input, model.nx(), model.ny());
        const float inv_batch = 1.0f / static_cast<float>(opt.batch);
        for (std::size_t i = 0; i < cells; ++i) {
          const auto col = static_cast<Eigen::Index>(i);
          const float rr = f(0, col) + static_cast<float>(z[i].real());
          const float ri = f(1, col) + static_cast<float>(z[i].imag());
          sample_loss += static_cast<double>(rr) * rr + static_cast<double>(ri) * ri;
          dout(0, col) = 2.0f * rr * inv_batch;
          dout(1, col) = 2.0f * ri * inv_batch;
        }
        net.backward(dout);
      }
      loss += sample_loss;
    }
    loss /= static_cast<double>(opt.batch);
    if (!std::isfinite(loss)) {
      std::ostringstream msg;
      msg << "loss became non-finite at step " << step;
      throw Error(ErrorKind::Diverged, msg.str());
    }
    curve.push_back(loss);
    adam.step(net);
  }
}

}  // namespace

std::vector<Complex> Perturbation::target_score() const {
  std::vector<Complex> target(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) target[i] = -z[i] / sigma;
  return target;
}

Perturbation perturb(std::span<const Complex> sample, double sigma, std::uint64_t seed) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorKind::NonPositiveSigma, "perturb requires finite sigma > 0");
  }
  Perturbation p;
  p.sigma = sigma;
  p.z = gaussian_field({seed, kPerturb}, sample.size());
  p.noisy.resize(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) p.noisy[i] = sample[i] + sigma * p.z[i];
  return p;
}

double dsm_loss(const ScoreFunction& model, const std::vector<std::vector<Complex>>& batch,
                const NoiseSchedule& schedule, std::uint64_t seed) {
  if (batch.empty()) throw Error(ErrorKind::EmptyBatch, "dsm_loss needs a non-empty batch");
  double total = 0.0;
  std::vector<Complex> noisy;
  std::vector<Complex> score;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& sample = batch[i];
    Rng rng = stream({seed, kDsmEval, static_cast<std::uint64_t>(i)});
    const int level = static_cast<int>(rng.uniform_int(schedule.n_levels));
    const double sigma = schedule.sigma(level);
    std::vector<Complex> z(sample.size());
    fill_gaussian(rng, z);
    noisy.resize(sample.size());
    for (std::size_t k = 0; k < sample.size(); ++k) noisy[k] = sample[k] + sigma * z[k];
    score.resize(sample.size());
    model.score(noisy, sigma, score);
    double loss = 0.0;
    for (std::size_t k = 0; k < sample.size(); ++k) {
      const Complex r = sigma * score[k] + z[k];
      loss += r.real() * r.real() + r.imag() * r.imag();
    }
    total += loss;
  }
  const double mean = total / static_cast<double>(batch.size());
  if (!std::isfinite(mean)) throw Error(ErrorKind::Diverged, "dsm_loss non-finite");
  return mean;
}

double scale_to_unit_max(std::vector<Complex>& sample) {
  double max_mag = 0.0;
  for (const auto& v : sample) max_mag = std::max(max_mag, std::abs(v));
  if (max_mag == 0.0) return 1.0;
  const double factor = 1.0 / max_mag;
  for (auto& v : sample) v *= factor;
  return factor;
}

ScoreModel train(const std::vector<std::vector<Complex>>& dataset, int nx, int ny,
                 ScoreRole role, const NoiseSchedule& schedule, const ModelArch& arch,
                 const OptConfig& opt, std::uint64_t seed) {
  ScoreModel model(role, schedule, arch, nx, ny, seed);
  run_training(model, dataset, opt, seed);
  return model;
}

ScoreModel train_from(const ScoreModel& init, ScoreRole role,
                      const std::vector<std::vector<Complex>>& dataset, const OptConfig& opt,
                      std::uint64_t seed) {
  // Fresh tag and curve, carried-over schedule, shape, and parameters.
  ScoreModel model(role, init.schedule(), init.arch(), init.nx(), init.ny(), seed);
  model_net(model).deserialize(model_net(init).serialize());
  run_training(model, dataset, opt, seed);
  return model;
}

}  // namespace cinediff
