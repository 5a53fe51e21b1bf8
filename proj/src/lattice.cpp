#include "mcpd/lattice.hpp"

#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "mcpd/kernels.hpp"
#include "mcpd/rng.hpp"

namespace mcpd {

namespace {

void check_side(int side) {
  if (side < 3) {
    throw std::invalid_argument("lattice side must be at least 3, got " +
                                std::to_string(side));
  }
}

void check_block(int side, int width) {
  if (width < 1 || width > side) {
    throw std::invalid_argument("block width " + std::to_string(width) +
                                " out of range for side " +
                                std::to_string(side));
  }
}

}  // namespace

InitPattern InitPattern::bernoulli(double rho0) {
  if (!(rho0 >= 0.0 && rho0 <= 1.0)) {
    throw std::invalid_argument("initial density must lie in [0, 1]");
  }
  InitPattern p;
  p.kind = Kind::Bernoulli;
  p.rho0 = rho0;
  return p;
}

InitPattern InitPattern::cooperator_block(int width) {
  if (width < 1) {
    throw std::invalid_argument("block width must be positive");
  }
  InitPattern p;
  p.kind = Kind::CooperatorBlock;
  p.width = width;
  return p;
}

InitPattern InitPattern::defector_block(int width) {
  if (width < 1) {
    throw std::invalid_argument("block width must be positive");
  }
  InitPattern p;
  p.kind = Kind::DefectorBlock;
  p.width = width;
  return p;
}

Lattice::Lattice(int side, std::vector<Strategy> cells)
    : side_(side), cells_(std::move(cells)) {}

Lattice::Lattice(int side, const InitPattern& pattern, std::uint64_t seed)
    : side_(side) {
  check_side(side);
  const std::int64_t n = static_cast<std::int64_t>(side) * side;
  cells_.resize(static_cast<std::size_t>(n));

  switch (pattern.kind) {
    case InitPattern::Kind::Bernoulli: {
      const std::uint64_t key = rng::at(seed, 0);
      for (std::int64_t i = 0; i < n; ++i) {
        const double u = rng::unit_at(key, static_cast<std::uint64_t>(i));
        cells_[static_cast<std::size_t>(i)] =
            u < pattern.rho0 ? Strategy::Cooperate : Strategy::Defect;
      }
      break;
    }
    case InitPattern::Kind::CooperatorBlock:
    case InitPattern::Kind::DefectorBlock: {
      check_block(side, pattern.width);
      const bool block_cooperates =
          pattern.kind == InitPattern::Kind::CooperatorBlock;
      const Strategy sea =
          block_cooperates ? Strategy::Defect : Strategy::Cooperate;
      const Strategy block =
          block_cooperates ? Strategy::Cooperate : Strategy::Defect;
      for (auto& c : cells_) c = sea;
      const int r0 = side / 2 - pattern.width / 2;
      for (int r = r0; r < r0 + pattern.width; ++r) {
        for (int c = r0; c < r0 + pattern.width; ++c) {
          cells_[static_cast<std::size_t>(r) * side + c] = block;
        }
      }
      break;
    }
  }
}

Lattice Lattice::from_cells(int side, std::vector<Strategy> cells) {
  check_side(side);
  const auto expected =
      static_cast<std::size_t>(side) * static_cast<std::size_t>(side);
  if (cells.size() != expected) {
    throw std::invalid_argument("cell array size does not match side^2");
  }
  return Lattice(side, std::move(cells));
}

Strategy Lattice::at(std::int64_t index) const {
  if (index < 0 || index >= size()) {
    throw std::out_of_range("cell index out of range");
  }
  return cells_[static_cast<std::size_t>(index)];
}

Strategy Lattice::at(int row, int col) const {
  if (row < 0 || row >= side_ || col < 0 || col >= side_) {
    throw std::out_of_range("cell coordinates out of range");
  }
  return cells_[static_cast<std::size_t>(row) * side_ + col];
}

std::array<std::int32_t, 4> Lattice::neighbors(std::int64_t index) const {
  if (index < 0 || index >= size()) {
    throw std::out_of_range("cell index out of range");
  }
  const auto L = side_;
  const auto r = static_cast<std::int32_t>(index / L);
  const auto c = static_cast<std::int32_t>(index % L);
  const std::int32_t up = r == 0 ? L - 1 : r - 1;
  const std::int32_t down = r == L - 1 ? 0 : r + 1;
  const std::int32_t left = c == 0 ? L - 1 : c - 1;
  const std::int32_t right = c == L - 1 ? 0 : c + 1;
  return {up * L + c, down * L + c, r * L + left, r * L + right};
}

std::int64_t Lattice::cooperator_count() const noexcept {
  return kernels::active().cooperator_count(cells_.data(), size());
}

double Lattice::cooperator_density() const noexcept {
  return static_cast<double>(cooperator_count()) / static_cast<double>(size());
}

void write_pgm(const Lattice& lattice, std::ostream& os) {
  const int L = lattice.side();
  os << "P2\n" << L << ' ' << L << "\n255\n";
  for (int r = 0; r < L; ++r) {
    for (int c = 0; c < L; ++c) {
      if (c) os << ' ';
      os << (lattice.at(r, c) == Strategy::Cooperate ? 255 : 0);
    }
    os << '\n';
  }
}

void write_pgm(const Lattice& lattice, const std::string& path) {
  std::ofstream os(path);
  if (!os) {
    throw std::runtime_error("cannot open " + path + " for writing");
  }
  write_pgm(lattice, os);
}

}  // namespace mcpd
