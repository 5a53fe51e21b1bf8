#pragma once

#include <string>
#include <vector>

#include "mcpd/lattice.hpp"

namespace mcpd {

// Update rules for the evolutionary dynamics.
enum class RuleKind { MonteCarlo, UnconditionalImitation, Replicator, Fermi };

RuleKind rule_from_string(const std::string& name);
std::string to_string(RuleKind rule);

// One-shot game parameters. A cooperator earns 1 per cooperating neighbor
// and 0 otherwise; a defector earns b per cooperating neighbor and 0
// otherwise, with 1 < b <= 2. lambda is the Fermi noise scale.
struct GameParams {
  double b = 1.10;
  double lambda = 0.0625;

  void validate() const;
};

// Payoff to `self` from a single encounter with `other`.
double pairwise_payoff(Strategy self, Strategy other, double b);

// Accumulated payoff of every cell against its four neighbors.
std::vector<double> compute_payoffs(const Lattice& lattice, double b);

}  // namespace mcpd
