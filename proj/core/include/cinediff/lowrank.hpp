#pragma once

#include <vector>

#include "cinediff/types.hpp"

namespace cinediff {

/// Sliding-window extent of the block-Hankel embedding; wt == 0 resolves to
/// the series' full nt, so the default (1, 1, 0) builds the Casorati matrix
/// (pixels x frames) that encodes temporal redundancy.
struct HankelWindow {
  int wx = 1;
  int wy = 1;
  int wt = 0;
};

struct LowRankConfig {
  int rank = 3;
  HankelWindow window{};
};

/// Column-major complex matrix; row r is the vectorized window starting at
/// the r-th (t, y, x) window origin, columns run over (dt, dy, dx) offsets.
struct HankelMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<Complex> data;

  Complex& at(int r, int c) { return data[static_cast<std::size_t>(c) * rows + r]; }
  const Complex& at(int r, int c) const { return data[static_cast<std::size_t>(c) * rows + r]; }
};

/// Stride-1, no-wrap sliding-window lift. Window (1,1,nt) yields the
/// (nx*ny) x nt Casorati matrix.
HankelMatrix hankel_embed(const DynamicSeries& series, HankelWindow window);

/// Pseudo-inverse of the lift: each cell is the arithmetic mean of every
/// matrix entry that maps to it. unembed(embed(x)) == x exactly.
DynamicSeries hankel_unembed(const HankelMatrix& matrix, int nx, int ny, int nt,
                             HankelWindow window, Domain domain = Domain::KSpace);

/// Hard-threshold SVD truncation of the embedding to the configured rank,
/// then unembed. Never increases the embedded nuclear norm; rank-a inputs
/// are fixed points.
DynamicSeries lowrank_project(const DynamicSeries& series, const LowRankConfig& config);

/// Singular values of the embedding, descending; diagnostic and test helper.
std::vector<double> hankel_singular_values(const DynamicSeries& series, HankelWindow window);

}  // namespace cinediff
