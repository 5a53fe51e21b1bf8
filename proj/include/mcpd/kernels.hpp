#pragma once

#include <cstdint>
#include <string>

#include "mcpd/lattice.hpp"

namespace mcpd::kernels {

// Which implementation of the inner loops to run. Auto resolves to the
// widest variant the CPU supports. All variants are bit-identical.
enum class Backend { Auto, Scalar, Avx2 };

Backend backend_from_string(const std::string& name);
std::string to_string(Backend backend);

// The hot loops, implemented once per backend over raw cell arrays.
struct Ops {
  const char* name;

  // out[i] = (cooperating neighbors of i) * (1 if cells[i] cooperates, else b)
  void (*payoff_field)(const Strategy* cells, int side, double b, double* out);

  // One synchronous roulette round. Every cell draws a unit uniform from
  // round_key at counter 2*i and selects among itself and its neighbors with
  // payoff at least its own, with probability proportional to payoff. A cell
  // whose pool has zero total payoff keeps its strategy. next must not alias
  // cells.
  void (*mc_round)(const Strategy* cells, const double* payoffs, int side,
                   std::uint64_t round_key, Strategy* next);

  std::int64_t (*cooperator_count)(const Strategy* cells, std::int64_t n);
};

const Ops& scalar_ops();
#if defined(__x86_64__) || defined(_M_X64)
const Ops& avx2_ops();
#endif

bool avx2_supported() noexcept;

// Process-wide selection, normally made once at startup.
// Requesting an unsupported backend throws std::invalid_argument.
void select_backend(Backend backend);
Backend selected_backend() noexcept;
const Ops& active() noexcept;

}  // namespace mcpd::kernels
