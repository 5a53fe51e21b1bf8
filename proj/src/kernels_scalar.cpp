#include <cstdint>

#include "kernels_detail.hpp"
#include "mcpd/kernels.hpp"

namespace mcpd::kernels {

namespace {

void payoff_field(const Strategy* cells, int side, double b, double* out) {
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) {
      out[r * side + c] = detail::payoff_cell(cells, side, b, r, c);
    }
  }
}

void mc_round(const Strategy* cells, const double* payoffs, int side,
              std::uint64_t round_key, Strategy* next) {
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) {
      next[r * side + c] =
          detail::mc_cell(cells, payoffs, side, round_key, r, c);
    }
  }
}

std::int64_t cooperator_count(const Strategy* cells, std::int64_t n) {
  std::int64_t total = 0;
  for (std::int64_t i = 0; i < n; ++i) {
    total += static_cast<std::int64_t>(cells[i]);
  }
  return total;
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops ops{"scalar", payoff_field, mc_round, cooperator_count};
  return ops;
}

}  // namespace mcpd::kernels
