#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace mcpd {

// The two pure strategies. The numeric value doubles as the cooperation
// indicator: summing raw cells counts cooperating neighbors.
enum class Strategy : std::uint8_t { Defect = 0, Cooperate = 1 };

// Initial configuration of a lattice.
//   Bernoulli(rho0)      each cell cooperates independently with prob rho0
//   CooperatorBlock(w)   all defectors except a centered w x w cooperator block
//   DefectorBlock(w)     all cooperators except a centered w x w defector block
struct InitPattern {
  enum class Kind { Bernoulli, CooperatorBlock, DefectorBlock };

  Kind kind = Kind::Bernoulli;
  double rho0 = 0.5;
  int width = 0;

  static InitPattern bernoulli(double rho0);
  static InitPattern cooperator_block(int width);
  static InitPattern defector_block(int width);
};

// Square L x L grid of strategies with periodic boundaries, row-major cells.
// Immutable once constructed; rounds produce new lattices.
class Lattice {
 public:
  Lattice(int side, const InitPattern& pattern, std::uint64_t seed);

  // Takes ownership of a prebuilt cell array (cells.size() must be side^2).
  static Lattice from_cells(int side, std::vector<Strategy> cells);

  int side() const noexcept { return side_; }
  std::int64_t size() const noexcept {
    return static_cast<std::int64_t>(side_) * side_;
  }

  Strategy at(std::int64_t index) const;
  Strategy at(int row, int col) const;
  const Strategy* data() const noexcept { return cells_.data(); }
  const std::vector<Strategy>& cells() const noexcept { return cells_; }

  // The four nearest neighbors of a cell, in the order up, down, left, right,
  // with wraparound. Always four distinct indices for side >= 3.
  std::array<std::int32_t, 4> neighbors(std::int64_t index) const;

  std::int64_t cooperator_count() const noexcept;
  double cooperator_density() const noexcept;

  bool operator==(const Lattice& other) const = default;

 private:
  Lattice(int side, std::vector<Strategy> cells);

  int side_;
  std::vector<Strategy> cells_;
};

// Plain (P2) PGM snapshot, one pixel per cell: cooperator 255, defector 0.
void write_pgm(const Lattice& lattice, std::ostream& os);
void write_pgm(const Lattice& lattice, const std::string& path);

}  // namespace mcpd
