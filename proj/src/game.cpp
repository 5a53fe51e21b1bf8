#include "mcpd/game.hpp"

#include <stdexcept>

#include "mcpd/kernels.hpp"

namespace mcpd {

RuleKind rule_from_string(const std::string& name) {
  if (name == "mc") return RuleKind::MonteCarlo;
  if (name == "ui") return RuleKind::UnconditionalImitation;
  if (name == "replicator") return RuleKind::Replicator;
  if (name == "fermi") return RuleKind::Fermi;
  throw std::invalid_argument("unknown rule '" + name +
                              "' (expected mc, ui, replicator, or fermi)");
}

std::string to_string(RuleKind rule) {
  switch (rule) {
    case RuleKind::MonteCarlo:
      return "mc";
    case RuleKind::UnconditionalImitation:
      return "ui";
    case RuleKind::Replicator:
      return "replicator";
    case RuleKind::Fermi:
      return "fermi";
  }
  throw std::logic_error("unreachable rule kind");
}

void GameParams::validate() const {
  if (!(b > 1.0 && b <= 2.0)) {
    throw std::invalid_argument("temptation b must lie in (1, 2], got " +
                                std::to_string(b));
  }
  if (!(lambda > 0.0)) {
    throw std::invalid_argument("fermi noise lambda must be positive");
  }
}

double pairwise_payoff(Strategy self, Strategy other, double b) {
  if (other == Strategy::Defect) return 0.0;
  return self == Strategy::Cooperate ? 1.0 : b;
}

std::vector<double> compute_payoffs(const Lattice& lattice, double b) {
  std::vector<double> payoffs(static_cast<std::size_t>(lattice.size()));
  kernels::active().payoff_field(lattice.data(), lattice.side(), b,
                                 payoffs.data());
  return payoffs;
}

}  // namespace mcpd
