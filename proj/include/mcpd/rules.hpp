#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "mcpd/game.hpp"
#include "mcpd/lattice.hpp"

namespace mcpd {

// 1 when a cell with payoff u_self may imitate a neighbor with payoff
// u_neighbor (that is, u_neighbor >= u_self), else 0.
int mc_eligibility(double u_self, double u_neighbor);

// Roulette outcome distribution for one cell: probability of keeping the
// current strategy followed by the probabilities of adopting each neighbor
// (up, down, left, right). Neighbors with payoff below the cell's own get
// zero weight; the rest enter with weight equal to their payoff, as does the
// cell itself. A pool with zero total weight keeps the current strategy.
std::array<double, 5> mc_transition_probabilities(
    double u_self, const std::array<double, 4>& u_neighbors);

// Probability that a cell with payoff u_self adopts the strategy of a
// neighbor with payoff u_other under pairwise noisy comparison.
// Equals 1 / (1 + exp((u_self - u_other) / lambda)), evaluated without
// overflow for any argument.
double fermi_probability(double u_self, double u_other, double lambda);

// Proportional-imitation probability: (u_other - u_self) normalized by the
// largest payoff difference possible between degree-k_self and k_other
// players, b * max(k_self, k_other). Zero when u_other <= u_self.
double replicator_probability(double u_self, double u_other, double b,
                              int k_self, int k_other);

// One synchronous round of the whole lattice under `rule`. round_key feeds
// the per-cell draws: cell i consumes counters 2i and 2i+1.
Lattice step(const Lattice& lattice, const GameParams& params, RuleKind rule,
             std::uint64_t round_key);

// Evolves one replicate. Round t (0-based) draws from key at(seed, t+1);
// the initial configuration drew from at(seed, 0), so a Simulation built on
// Lattice(side, pattern, seed) with the same seed replays one full stream.
class Simulation {
 public:
  Simulation(const Lattice& initial, const GameParams& params, RuleKind rule,
             std::uint64_t replicate_seed);

  int side() const noexcept { return side_; }
  std::int64_t size() const noexcept {
    return static_cast<std::int64_t>(side_) * side_;
  }
  int round() const noexcept { return round_; }
  std::int64_t cooperator_count() const noexcept { return coop_; }
  double density() const noexcept {
    return static_cast<double>(coop_) / static_cast<double>(size());
  }
  Lattice lattice() const;

  void advance(int rounds = 1);

 private:
  void advance_one();

  int side_;
  GameParams params_;
  RuleKind rule_;
  std::uint64_t seed_;
  int round_ = 0;
  std::int64_t coop_;
  std::vector<Strategy> cells_;
  std::vector<Strategy> next_;
  std::vector<double> payoffs_;
  // Adoption probabilities indexed by payoff class (cooperating neighbor
  // count, defectors offset by 5); empty for rules that compare payoffs
  // directly.
  std::vector<double> prob_table_;
};

}  // namespace mcpd
