#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "mcpd/game.hpp"
#include "mcpd/lattice.hpp"

namespace mcpd {

// A replicated experiment: `replicates` independent trajectories of `rounds`
// synchronous updates on a side x side lattice. Replicate r derives its seed
// from the master seed, so results are reproducible and schedule-independent.
struct RunConfig {
  int side = 100;
  GameParams params{};
  RuleKind rule = RuleKind::MonteCarlo;
  InitPattern pattern = InitPattern::bernoulli(0.5);
  int rounds = 2000;
  int eq_window = 200;
  int replicates = 100;
  std::uint64_t seed = 1;
  int threads = 0;  // 0 = all available cores

  void validate() const;
};

// Aggregates over replicates. Equilibrium density is the mean cooperator
// density over the trailing eq_window rounds of each replicate, averaged;
// rho_stddev is the sample standard deviation of the per-replicate values.
// Per-strategy returns are final-round means, averaged over the replicates
// where the strategy still exists (NaN when it exists in none).
struct EquilibriumStats {
  double rho_mean = 0.0;
  double rho_stddev = 0.0;
  std::vector<double> series_mean;  // length rounds+1, t = 0..rounds
  double avg_return_c = 0.0;
  double avg_return_d = 0.0;
  int replicates = 0;
};

EquilibriumStats run_replicates(const RunConfig& config);

// Density trajectory of a single replicate (rounds+1 entries). on_snapshot,
// when set, sees the lattice at every round listed in snapshot_rounds.
std::vector<double> run_trajectory(
    const RunConfig& config, int replicate_index,
    const std::vector<int>& snapshot_rounds = {},
    const std::function<void(int, const Lattice&)>& on_snapshot = {});

// Mean payoff of cooperators and defectors on one lattice; a strategy with
// no cells yields NaN.
std::pair<double, double> strategy_mean_payoffs(const Lattice& lattice,
                                                double b);

// Largest minus smallest value over the trailing `window` entries.
double series_drift(const std::vector<double>& series, int window);

struct SweepPoint {
  double b;
  EquilibriumStats stats;
};
std::vector<SweepPoint> sweep_b(const RunConfig& base,
                                const std::vector<double>& b_values);

// All-cooperator lattice invaded by a centered defector square sized to the
// requested population fraction: width = round(side * sqrt(fraction)).
struct InvasionPattern {
  InitPattern pattern;
  int width;
  double fraction;  // realized width^2 / side^2
};
InvasionPattern invasion_scenario(int side, double target_fraction);

// All-defector lattice seeded with a centered width x width cooperator block.
InitPattern cluster_scenario(int side, int width);

struct Rho0Point {
  double rho0;
  EquilibriumStats stats;
};
std::vector<Rho0Point> sweep_rho0(const RunConfig& base,
                                  const std::vector<double>& rho0_values);

struct PopulationPoint {
  int side;
  std::int64_t population;
  EquilibriumStats stats;
};
std::vector<PopulationPoint> sweep_population(const RunConfig& base,
                                              const std::vector<int>& sides);

// Runs every rule on identical initial conditions (same seeds).
struct RulePoint {
  RuleKind rule;
  EquilibriumStats stats;
};
std::vector<RulePoint> compare_rules(const RunConfig& base);

}  // namespace mcpd
