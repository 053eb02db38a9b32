#include "cinediff/score_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <sstream>

#include "conv_net.hpp"
#include "model_input.hpp"

namespace cinediff {

namespace {

using NetF = detail::ConvNet<float>;

std::vector<detail::ConvLayerSpec> to_layer_specs(const ModelArch& arch) {
  if (arch.layers.empty()) {
    throw Error(ErrorKind::InvalidSpec, "architecture needs at least one layer");
  }
  if (arch.layers.front().in != 3) {
    throw Error(ErrorKind::InvalidSpec, "first layer must take 3 input channels");
  }
  if (arch.layers.back().out != 2) {
    throw Error(ErrorKind::InvalidSpec, "last layer must emit 2 output channels");
  }
  std::vector<detail::ConvLayerSpec> specs;
  specs.reserve(arch.layers.size());
  for (const auto& l : arch.layers) specs.push_back({l.in, l.out, l.kernel, l.dilation});
  return specs;
}

constexpr float kLeakySlope = 0.1f;

void put_u32le(std::ostream& out, std::uint32_t v) {
  std::array<char, 4> b = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                           static_cast<char>((v >> 16) & 0xff),
                           static_cast<char>((v >> 24) & 0xff)};
  out.write(b.data(), 4);
}

std::uint32_t get_u32le(std::istream& in, const std::filesystem::path& path) {
  std::array<unsigned char, 4> b{};
  in.read(reinterpret_cast<char*>(b.data()), 4);
  if (in.gcount() != 4) throw Error(ErrorKind::Truncated, "checkpoint truncated: " + path.string());
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void put_f64le(std::ostream& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  for (int i = 0; i < 8; ++i) out.put(static_cast<char>((bits >> (8 * i)) & 0xff));
}

double get_f64le(std::istream& in, const std::filesystem::path& path) {
  std::array<unsigned char, 8> b{};
  in.read(reinterpret_cast<char*>(b.data()), 8);
  if (in.gcount() != 8) throw Error(ErrorKind::Truncated, "checkpoint truncated: " + path.string());
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

}  // namespace

ModelArch ModelArch::standard() {
  ModelArch arch;
  arch.layers = {{3, 16, 3, 1}, {16, 16, 3, 2}, {16, 16, 3, 4}, {16, 2, 3, 1}};
  return arch;
}

ScoreModel::ScoreModel(ScoreRole role, NoiseSchedule schedule, ModelArch arch, int nx, int ny,
                       std::uint64_t init_seed)
    : role_(role), schedule_(std::move(schedule)), arch_(std::move(arch)), nx_(nx), ny_(ny) {
  if (nx_ <= 0 || ny_ <= 0) {
    throw Error(ErrorKind::DegenerateShape, "model frame shape must be positive");
  }
  net_ = std::make_unique<NetF>(to_layer_specs(arch_), kLeakySlope, init_seed);
  net_->zero_last_layer();
}

ScoreModel::ScoreModel(const ScoreModel& other)
    : role_(other.role_),
      schedule_(other.schedule_),
      arch_(other.arch_),
      nx_(other.nx_),
      ny_(other.ny_),
      net_(std::make_unique<NetF>(*other.net_)),
      loss_curve_(other.loss_curve_),
      warned_clamp_(other.warned_clamp_) {}

ScoreModel& ScoreModel::operator=(const ScoreModel& other) {
  if (this != &other) {
    role_ = other.role_;
    schedule_ = other.schedule_;
    arch_ = other.arch_;
    nx_ = other.nx_;
    ny_ = other.ny_;
    net_ = std::make_unique<NetF>(*other.net_);
    loss_curve_ = other.loss_curve_;
    warned_clamp_ = other.warned_clamp_;
  }
  return *this;
}

ScoreModel::ScoreModel(ScoreModel&&) noexcept = default;
ScoreModel& ScoreModel::operator=(ScoreModel&&) noexcept = default;
ScoreModel::~ScoreModel() = default;

void ScoreModel::score(std::span<const Complex> x, double sigma, std::span<Complex> out) const {
  const std::size_t n = static_cast<std::size_t>(nx_) * ny_;
  if (x.size() != n || out.size() != n) {
    std::ostringstream msg;
    msg << "model expects " << nx_ << "x" << ny_ << " frames, got " << x.size() << " cells";
    throw Error(ErrorKind::ShapeMismatch, msg.str());
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorKind::NonPositiveSigma, "score requires finite sigma > 0");
  }
  double s = sigma;
  if (s < schedule_.sigma_min || s > schedule_.sigma_max) {
    s = std::clamp(s, schedule_.sigma_min, schedule_.sigma_max);
    if (!warned_clamp_) {
      warned_clamp_ = true;
      std::cerr << "warning: sigma " << sigma << " outside trained range ["
                << schedule_.sigma_min << ", " << schedule_.sigma_max << "], clamped\n";
    }
  }

  NetF::Matrix input;
  detail::build_score_input(x, s, schedule_, input);

  // forward() caches state; evaluation is const in the logical sense only.
  auto& net = const_cast<NetF&>(*net_);
  const NetF::Matrix& f = net.forward(input, nx_, ny_);
  const double inv_sigma = 1.0 / s;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = Complex(static_cast<double>(f(0, static_cast<Eigen::Index>(i))) * inv_sigma,
                     static_cast<double>(f(1, static_cast<Eigen::Index>(i))) * inv_sigma);
  }
}

void ScoreModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoFailure, "cannot open for writing: " + path.string());
  out.write("GLM1", 4);
  out.put(role_ == ScoreRole::Global ? 0 : (role_ == ScoreRole::Local ? 1 : 2));
  out.put(0);
  out.put(0);
  out.put(0);
  put_f64le(out, schedule_.sigma_min);
  put_f64le(out, schedule_.sigma_max);
  put_u32le(out, static_cast<std::uint32_t>(schedule_.n_levels));
  put_u32le(out, static_cast<std::uint32_t>(nx_));
  put_u32le(out, static_cast<std::uint32_t>(ny_));
  put_u32le(out, static_cast<std::uint32_t>(arch_.layers.size()));
  for (const auto& l : arch_.layers) {
    put_u32le(out, static_cast<std::uint32_t>(l.in));
    put_u32le(out, static_cast<std::uint32_t>(l.out));
    put_u32le(out, static_cast<std::uint32_t>(l.kernel));
    put_u32le(out, static_cast<std::uint32_t>(l.dilation));
  }
  const std::vector<float> blob = net_->serialize();
  put_u32le(out, static_cast<std::uint32_t>(blob.size()));
  for (float v : blob) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    put_u32le(out, bits);
  }
  if (!out) throw Error(ErrorKind::IoFailure, "write failed: " + path.string());
}

ScoreModel ScoreModel::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot open for reading: " + path.string());
  std::array<char, 4> magic{};
  in.read(magic.data(), 4);
  if (in.gcount() != 4 || std::memcmp(magic.data(), "GLM1", 4) != 0) {
    throw Error(ErrorKind::BadMagic, "not a GLM1 checkpoint: " + path.string());
  }
  std::array<char, 4> rolebytes{};
  in.read(rolebytes.data(), 4);
  if (in.gcount() != 4) throw Error(ErrorKind::Truncated, "checkpoint truncated: " + path.string());
  ScoreRole role;
  switch (rolebytes[0]) {
    case 0: role = ScoreRole::Global; break;
    case 1: role = ScoreRole::Local; break;
    case 2: role = ScoreRole::Any; break;
    default: throw Error(ErrorKind::InvalidSpec, "unknown role tag in " + path.string());
  }
  const double sigma_min = get_f64le(in, path);
  const double sigma_max = get_f64le(in, path);
  const int n_levels = static_cast<int>(get_u32le(in, path));
  const int nx = static_cast<int>(get_u32le(in, path));
  const int ny = static_cast<int>(get_u32le(in, path));
  const std::uint32_t n_layers = get_u32le(in, path);
  if (n_layers == 0 || n_layers > 64) {
    throw Error(ErrorKind::InvalidSpec, "implausible layer count in " + path.string());
  }
  ModelArch arch;
  for (std::uint32_t l = 0; l < n_layers; ++l) {
    ConvSpec s;
    s.in = static_cast<int>(get_u32le(in, path));
    s.out = static_cast<int>(get_u32le(in, path));
    s.kernel = static_cast<int>(get_u32le(in, path));
    s.dilation = static_cast<int>(get_u32le(in, path));
    arch.layers.push_back(s);
  }
  ScoreModel model(role, NoiseSchedule::geometric(sigma_min, sigma_max, n_levels),
                   std::move(arch), nx, ny, 0);
  const std::uint32_t n_params = get_u32le(in, path);
  if (n_params != model.net_->n_params()) {
    throw Error(ErrorKind::Truncated, "parameter count disagrees with architecture in " +
                                          path.string());
  }
  std::vector<float> blob(n_params);
  for (auto& v : blob) {
    const std::uint32_t bits = get_u32le(in, path);
    std::memcpy(&v, &bits, 4);
  }
  model.net_->deserialize(blob);
  return model;
}

detail::ConvNet<float>& model_net(ScoreModel& model) { return *model.net_; }
const detail::ConvNet<float>& model_net(const ScoreModel& model) { return *model.net_; }
std::vector<double>& model_loss_curve(ScoreModel& model) { return model.loss_curve_; }

}  // namespace cinediff
