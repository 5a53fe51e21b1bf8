#pragma once

#include <cstdint>

#include "mcpd/kernels.hpp"
#include "mcpd/rng.hpp"

// Single-cell reference logic shared by every backend. The vector backends
// fall back to these routines on lattice edges and on the rare draw that
// rounds up against the roulette total, so all backends stay bit-identical.

namespace mcpd::kernels::detail {

inline void cell_neighbors(int L, int r, int c, int out[4]) noexcept {
  const int row = r * L;
  out[0] = (r == 0 ? L - 1 : r - 1) * L + c;
  out[1] = (r == L - 1 ? 0 : r + 1) * L + c;
  out[2] = row + (c == 0 ? L - 1 : c - 1);
  out[3] = row + (c == L - 1 ? 0 : c + 1);
}

inline double payoff_cell(const Strategy* cells, int L, double b, int r,
                          int c) noexcept {
  int nbr[4];
  cell_neighbors(L, r, c, nbr);
  const int count =
      static_cast<int>(cells[nbr[0]]) + static_cast<int>(cells[nbr[1]]) +
      static_cast<int>(cells[nbr[2]]) + static_cast<int>(cells[nbr[3]]);
  const double factor =
      cells[r * L + c] == Strategy::Cooperate ? 1.0 : b;
  return static_cast<double>(count) * factor;
}

inline Strategy mc_cell(const Strategy* cells, const double* payoffs, int L,
                        std::uint64_t round_key, int r, int c) noexcept {
  const int i = r * L + c;
  int nbr[4];
  cell_neighbors(L, r, c, nbr);

  const double u0 = payoffs[i];
  double w[4];
  for (int k = 0; k < 4; ++k) {
    const double uk = payoffs[nbr[k]];
    w[k] = uk >= u0 ? uk : 0.0;
  }
  const double c0 = u0;
  const double c1 = c0 + w[0];
  const double c2 = c1 + w[1];
  const double c3 = c2 + w[2];
  const double c4 = c3 + w[3];
  if (c4 == 0.0) return cells[i];

  const double u = rng::unit_at(round_key, 2 * static_cast<std::uint64_t>(i));
  const double t = u * c4;
  int j = (c0 <= t) + (c1 <= t) + (c2 <= t) + (c3 <= t);
  if (t >= c4) {
    // u*c4 rounded up to the total; land in the last occupied slot.
    j = 4;
    while (j > 0 && w[j - 1] == 0.0) --j;
  }
  return j == 0 ? cells[i] : cells[nbr[j - 1]];
}

}  // namespace mcpd::kernels::detail
