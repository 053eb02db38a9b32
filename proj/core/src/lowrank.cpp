#include "cinediff/lowrank.hpp"

#include <Eigen/Dense>

#include <sstream>

namespace cinediff {

namespace {

struct WindowGeom {
  int wx, wy, wt;  // resolved window
  int sx, sy, st;  // number of window origins per axis
  int rows() const { return sx * sy * st; }
  int cols() const { return wx * wy * wt; }
};

WindowGeom resolve(const DynamicSeries& series, HankelWindow window) {
  WindowGeom g;
  g.wx = window.wx;
  g.wy = window.wy;
  g.wt = window.wt == 0 ? series.nt : window.wt;
  if (g.wx <= 0 || g.wy <= 0 || g.wt <= 0) {
    throw Error(ErrorKind::InvalidSpec, "window extents must be positive");
  }
  if (g.wx > series.nx || g.wy > series.ny || g.wt > series.nt) {
    std::ostringstream msg;
    msg << "window " << g.wx << "x" << g.wy << "x" << g.wt << " does not fit in " << series.nx
        << "x" << series.ny << "x" << series.nt;
    throw Error(ErrorKind::WindowTooLarge, msg.str());
  }
  g.sx = series.nx - g.wx + 1;
  g.sy = series.ny - g.wy + 1;
  g.st = series.nt - g.wt + 1;
  return g;
}

using MatrixXcd = Eigen::MatrixXcd;

}  // namespace

HankelMatrix hankel_embed(const DynamicSeries& series, HankelWindow window) {
  validate(series).require();
  const WindowGeom g = resolve(series, window);
  HankelMatrix m;
  m.rows = g.rows();
  m.cols = g.cols();
  m.data.assign(static_cast<std::size_t>(m.rows) * m.cols, Complex(0.0, 0.0));
  // Row order (st, sy, sx) makes the Casorati case a pure reshape: row
  // index equals the pixel index y*nx + x.
  for (int st = 0; st < g.st; ++st) {
    for (int sy = 0; sy < g.sy; ++sy) {
      for (int sx = 0; sx < g.sx; ++sx) {
        const int r = (st * g.sy + sy) * g.sx + sx;
        int c = 0;
        for (int dt = 0; dt < g.wt; ++dt) {
          for (int dy = 0; dy < g.wy; ++dy) {
            for (int dx = 0; dx < g.wx; ++dx) {
              m.at(r, c) = series.at(st + dt, sy + dy, sx + dx);
              ++c;
            }
          }
        }
      }
    }
  }
  return m;
}

DynamicSeries hankel_unembed(const HankelMatrix& matrix, int nx, int ny, int nt,
                             HankelWindow window, Domain domain) {
  DynamicSeries out(nx, ny, nt, domain);
  const WindowGeom g = resolve(out, window);
  if (matrix.rows != g.rows() || matrix.cols != g.cols()) {
    std::ostringstream msg;
    msg << "matrix " << matrix.rows << "x" << matrix.cols << " inconsistent with shape/window ("
        << g.rows() << "x" << g.cols() << " expected)";
    throw Error(ErrorKind::ShapeMismatch, msg.str());
  }

  // Extended-precision accumulation: summing m identical doubles stays exact
  // in the 64-bit mantissa, so unembed(embed(x)) reproduces x bit for bit.
  std::vector<long double> sum_re(out.size(), 0.0L);
  std::vector<long double> sum_im(out.size(), 0.0L);
  std::vector<std::uint32_t> count(out.size(), 0);

  for (int st = 0; st < g.st; ++st) {
    for (int sy = 0; sy < g.sy; ++sy) {
      for (int sx = 0; sx < g.sx; ++sx) {
        const int r = (st * g.sy + sy) * g.sx + sx;
        int c = 0;
        for (int dt = 0; dt < g.wt; ++dt) {
          for (int dy = 0; dy < g.wy; ++dy) {
            for (int dx = 0; dx < g.wx; ++dx) {
              const std::size_t cell =
                  (static_cast<std::size_t>(st + dt) * ny + (sy + dy)) * nx + (sx + dx);
              const Complex& v = matrix.at(r, c);
              sum_re[cell] += static_cast<long double>(v.real());
              sum_im[cell] += static_cast<long double>(v.imag());
              count[cell] += 1;
              ++c;
            }
          }
        }
      }
    }
  }

  for (std::size_t i = 0; i < out.size(); ++i) {
    const long double n = static_cast<long double>(count[i]);
    out.data[i] = Complex(static_cast<double>(sum_re[i] / n), static_cast<double>(sum_im[i] / n));
  }
  return out;
}

DynamicSeries lowrank_project(const DynamicSeries& series, const LowRankConfig& config) {
  HankelMatrix m = hankel_embed(series, config.window);
  const int min_dim = std::min(m.rows, m.cols);
  if (config.rank < 1 || config.rank > min_dim) {
    std::ostringstream msg;
    msg << "rank " << config.rank << " outside [1, " << min_dim << "]";
    throw Error(ErrorKind::RankTooLarge, msg.str());
  }

  Eigen::Map<const MatrixXcd> mapped(m.data.data(), m.rows, m.cols);
  Eigen::JacobiSVD<MatrixXcd> svd(mapped, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  // Hard threshold: keep the leading `rank` triplets (Eigen returns
  // descending singular values; ties keep earlier indices).
  MatrixXcd truncated = svd.matrixU().leftCols(config.rank) *
                        sv.head(config.rank).asDiagonal() *
                        svd.matrixV().leftCols(config.rank).adjoint();

  HankelMatrix t;
  t.rows = m.rows;
  t.cols = m.cols;
  t.data.assign(truncated.data(), truncated.data() + truncated.size());
  return hankel_unembed(t, series.nx, series.ny, series.nt, config.window, series.domain);
}

std::vector<double> hankel_singular_values(const DynamicSeries& series, HankelWindow window) {
  HankelMatrix m = hankel_embed(series, window);
  Eigen::Map<const MatrixXcd> mapped(m.data.data(), m.rows, m.cols);
  Eigen::JacobiSVD<MatrixXcd> svd(mapped);
  std::vector<double> out(svd.singularValues().data(),
                          svd.singularValues().data() + svd.singularValues().size());
  return out;
}

}  // namespace cinediff
