#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <vector>

#include "cinediff/error.hpp"
#include "cinediff/rng.hpp"

namespace cinediff::detail {

struct ConvLayerSpec {
  int in = 0;
  int out = 0;
  int kernel = 3;
  int dilation = 1;
};

/// Small same-size convolutional stack with leaky-ReLU activations on all but
/// the last layer. Templated on the scalar so the production float path and
/// the double-precision finite-difference check share one implementation.
///
/// Feature maps are (channels x pixels) column-major matrices; pixel p of a
/// (ny, nx) frame is y * nx + x. Zero padding of dilation * (kernel-1) / 2
/// keeps the spatial size fixed.
template <typename T>
class ConvNet {
 public:
  using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<T, Eigen::Dynamic, 1>;

  ConvNet(std::vector<ConvLayerSpec> specs, T leaky_slope, std::uint64_t init_seed)
      : slope_(leaky_slope) {
    if (specs.empty()) throw Error(ErrorKind::InvalidSpec, "network needs at least one layer");
    layers_.reserve(specs.size());
    for (std::size_t l = 0; l < specs.size(); ++l) {
      const ConvLayerSpec& s = specs[l];
      if (s.in <= 0 || s.out <= 0 || s.kernel <= 0 || s.kernel % 2 == 0 || s.dilation <= 0) {
        throw Error(ErrorKind::InvalidSpec, "conv layer needs odd kernel, positive dims");
      }
      if (l > 0 && specs[l - 1].out != s.in) {
        throw Error(ErrorKind::InvalidSpec, "channel count mismatch between conv layers");
      }
      Layer layer;
      layer.spec = s;
      const int K = s.in * s.kernel * s.kernel;
      layer.w = Matrix::Zero(s.out, K);
      layer.b = Vector::Zero(s.out);
      layer.dw = Matrix::Zero(s.out, K);
      layer.db = Vector::Zero(s.out);
      // He-normal fan-in init keeps activations near unit scale at depth.
      Rng rng = stream({init_seed, 0x636f6e76ULL, static_cast<std::uint64_t>(l)});
      const T sd = std::sqrt(T(2) / static_cast<T>(K));
      for (int r = 0; r < layer.w.rows(); ++r) {
        for (int c = 0; c < layer.w.cols(); ++c) {
          layer.w(r, c) = sd * static_cast<T>(rng.gaussian());
        }
      }
      layers_.push_back(std::move(layer));
    }
  }

  int in_channels() const { return layers_.front().spec.in; }
  int out_channels() const { return layers_.back().spec.out; }

  /// Zero the final layer so the net starts as the zero function; standard
  /// for residual-style targets (initial score identically zero).
  void zero_last_layer() {
    layers_.back().w.setZero();
    layers_.back().b.setZero();
  }

  /// input: (in_channels x nx*ny). Returns the last layer's activation and
  /// caches intermediates for backward().
  const Matrix& forward(const Matrix& input, int nx, int ny) {
    if (input.rows() != in_channels() ||
        input.cols() != static_cast<Eigen::Index>(nx) * ny) {
      throw Error(ErrorKind::ShapeMismatch, "network input shape mismatch");
    }
    nx_ = nx;
    ny_ = ny;
    const Matrix* x = &input;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      Layer& layer = layers_[l];
      im2col(*x, layer.spec, layer.cols);
      layer.pre.noalias() = layer.w * layer.cols;
      layer.pre.colwise() += layer.b;
      const bool last = (l + 1 == layers_.size());
      if (last) {
        layer.post = layer.pre;
      } else {
        layer.post = layer.pre.unaryExpr([this](T v) { return v > T(0) ? v : slope_ * v; });
      }
      x = &layer.post;
    }
    return layers_.back().post;
  }

  /// dout: gradient w.r.t. the forward output. Accumulates parameter
  /// gradients and returns the gradient w.r.t. the forward input.
  Matrix backward(const Matrix& dout) {
    Matrix grad = dout;
    for (std::size_t li = layers_.size(); li-- > 0;) {
      Layer& layer = layers_[li];
      const bool last = (li + 1 == layers_.size());
      if (!last) {
        grad = grad.cwiseProduct(layer.pre.unaryExpr(
            [this](T v) { return v > T(0) ? T(1) : slope_; }));
      }
      layer.dw.noalias() += grad * layer.cols.transpose();
      layer.db.noalias() += grad.rowwise().sum();
      Matrix dcols;
      dcols.noalias() = layer.w.transpose() * grad;
      grad = col2im(dcols, layer.spec);
    }
    return grad;
  }

  void zero_grad() {
    for (auto& layer : layers_) {
      layer.dw.setZero();
      layer.db.setZero();
    }
  }

  /// Visit (param, grad, count) chunks in a stable order.
  template <typename Fn>
  void visit_params(Fn&& fn) {
    for (auto& layer : layers_) {
      fn(layer.w.data(), layer.dw.data(), static_cast<std::size_t>(layer.w.size()));
      fn(layer.b.data(), layer.db.data(), static_cast<std::size_t>(layer.b.size()));
    }
  }

  std::size_t n_params() const {
    std::size_t n = 0;
    for (const auto& layer : layers_) {
      n += static_cast<std::size_t>(layer.w.size()) + static_cast<std::size_t>(layer.b.size());
    }
    return n;
  }

  std::vector<ConvLayerSpec> specs() const {
    std::vector<ConvLayerSpec> out;
    out.reserve(layers_.size());
    for (const auto& layer : layers_) out.push_back(layer.spec);
    return out;
  }

  std::vector<float> serialize() const {
    std::vector<float> blob;
    blob.reserve(n_params());
    for (const auto& layer : layers_) {
      for (Eigen::Index i = 0; i < layer.w.size(); ++i) {
        blob.push_back(static_cast<float>(layer.w.data()[i]));
      }
      for (Eigen::Index i = 0; i < layer.b.size(); ++i) {
        blob.push_back(static_cast<float>(layer.b.data()[i]));
      }
    }
    return blob;
  }

  void deserialize(const std::vector<float>& blob) {
    if (blob.size() != n_params()) {
      throw Error(ErrorKind::Truncated, "parameter blob size does not match architecture");
    }
    std::size_t k = 0;
    for (auto& layer : layers_) {
      for (Eigen::Index i = 0; i < layer.w.size(); ++i) {
        layer.w.data()[i] = static_cast<T>(blob[k++]);
      }
      for (Eigen::Index i = 0; i < layer.b.size(); ++i) {
        layer.b.data()[i] = static_cast<T>(blob[k++]);
      }
    }
  }

 private:
  struct Layer {
    ConvLayerSpec spec;
    Matrix w, dw;
    Vector b, db;
    Matrix cols;  // im2col of the layer input
    Matrix pre;   // pre-activation
    Matrix post;  // activation output
  };

  void im2col(const Matrix& input, const ConvLayerSpec& spec, Matrix& cols) const {
    const int k = spec.kernel;
    const int d = spec.dilation;
    const int half = k / 2;
    const Eigen::Index K = static_cast<Eigen::Index>(spec.in) * k * k;
    const Eigen::Index N = static_cast<Eigen::Index>(nx_) * ny_;
    cols.resize(K, N);
    for (int y = 0; y < ny_; ++y) {
      for (int x = 0; x < nx_; ++x) {
        const Eigen::Index p = static_cast<Eigen::Index>(y) * nx_ + x;
        Eigen::Index row = 0;
        for (int c = 0; c < spec.in; ++c) {
          for (int ky = -half; ky <= half; ++ky) {
            const int sy = y + ky * d;
            const bool oky = (sy >= 0 && sy < ny_);
            for (int kx = -half; kx <= half; ++kx) {
              const int sx = x + kx * d;
              if (oky && sx >= 0 && sx < nx_) {
                cols(row, p) = input(c, static_cast<Eigen::Index>(sy) * nx_ + sx);
              } else {
                cols(row, p) = T(0);
              }
              ++row;
            }
          }
        }
      }
    }
  }

  Matrix col2im(const Matrix& dcols, const ConvLayerSpec& spec) const {
    const int k = spec.kernel;
    const int d = spec.dilation;
    const int half = k / 2;
    const Eigen::Index N = static_cast<Eigen::Index>(nx_) * ny_;
    Matrix dinput = Matrix::Zero(spec.in, N);
    for (int y = 0; y < ny_; ++y) {
      for (int x = 0; x < nx_; ++x) {
        const Eigen::Index p = static_cast<Eigen::Index>(y) * nx_ + x;
        Eigen::Index row = 0;
        for (int c = 0; c < spec.in; ++c) {
          for (int ky = -half; ky <= half; ++ky) {
            const int sy = y + ky * d;
            const bool oky = (sy >= 0 && sy < ny_);
            for (int kx = -half; kx <= half; ++kx) {
              const int sx = x + kx * d;
              if (oky && sx >= 0 && sx < nx_) {
                dinput(c, static_cast<Eigen::Index>(sy) * nx_ + sx) += dcols(row, p);
              }
              ++row;
            }
          }
        }
      }
    }
    return dinput;
  }

  std::vector<Layer> layers_;
  T slope_;
  int nx_ = 0;
  int ny_ = 0;
};

}  // namespace cinediff::detail
