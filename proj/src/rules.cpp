#include "mcpd/rules.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "kernels_detail.hpp"
#include "mcpd/kernels.hpp"
#include "mcpd/rng.hpp"

namespace mcpd {

int mc_eligibility(double u_self, double u_neighbor) {
  return u_self > u_neighbor ? 0 : 1;
}

std::array<double, 5> mc_transition_probabilities(
    double u_self, const std::array<double, 4>& u_neighbors) {
  if (u_self < 0.0) {
    throw std::invalid_argument("payoffs must be non-negative");
  }
  double denom = u_self;
  for (const double u : u_neighbors) {
    if (u < 0.0) {
      throw std::invalid_argument("payoffs must be non-negative");
    }
    if (mc_eligibility(u_self, u)) denom += u;
  }
  std::array<double, 5> p{};
  if (denom == 0.0) {
    p[0] = 1.0;
    return p;
  }
  p[0] = u_self / denom;
  for (int k = 0; k < 4; ++k) {
    p[k + 1] = mc_eligibility(u_self, u_neighbors[k])
                   ? u_neighbors[k] / denom
                   : 0.0;
  }
  return p;
}

double fermi_probability(double u_self, double u_other, double lambda) {
  if (!(lambda > 0.0)) {
    throw std::invalid_argument("fermi noise lambda must be positive");
  }
  const double x = (u_self - u_other) / lambda;
  if (x > 0.0) {
    const double e = std::exp(-x);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(x));
}

double replicator_probability(double u_self, double u_other, double b,
                              int k_self, int k_other) {
  if (u_other <= u_self) return 0.0;
  const double gap = b * static_cast<double>(std::max(k_self, k_other));
  return std::clamp((u_other - u_self) / gap, 0.0, 1.0);
}

namespace {

void ui_round(const Strategy* cells, const double* payoffs, int side,
              std::uint64_t round_key, Strategy* next) {
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) {
      const int i = r * side + c;
      int nbr[4];
      kernels::detail::cell_neighbors(side, r, c, nbr);
      const double u0 = payoffs[i];
      double best = u0;
      for (int k = 0; k < 4; ++k) best = std::max(best, payoffs[nbr[k]]);
      if (best <= u0) {
        next[i] = cells[i];
        continue;
      }
      int tied[4] = {i, i, i, i};
      int m = 0;
      for (int k = 0; k < 4; ++k) {
        if (payoffs[nbr[k]] == best) tied[m++] = nbr[k];
      }
      int pick = 0;
      if (m > 1) {
        const double u =
            rng::unit_at(round_key, 2 * static_cast<std::uint64_t>(i));
        pick = static_cast<int>(u * m);
      }
      next[i] = cells[tied[pick]];
    }
  }
}

void replicator_round(const Strategy* cells, const double* payoffs, int side,
                      double b, std::uint64_t round_key, Strategy* next) {
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) {
      const int i = r * side + c;
      int nbr[4];
      kernels::detail::cell_neighbors(side, r, c, nbr);
      const double u_pick =
          rng::unit_at(round_key, 2 * static_cast<std::uint64_t>(i));
      const int j = nbr[static_cast<int>(u_pick * 4.0)];
      next[i] = cells[i];
      if (payoffs[j] > payoffs[i]) {
        const double p = replicator_probability(payoffs[i], payoffs[j], b, 4, 4);
        const double u_acc =
            rng::unit_at(round_key, 2 * static_cast<std::uint64_t>(i) + 1);
        if (u_acc < p) next[i] = cells[j];
      }
    }
  }
}

// Adoption probabilities by payoff class. A cell's payoff is determined by
// its cooperating-neighbor count and own strategy, so the 10x10 table covers
// every (self, neighbor) payoff pair exactly.
std::vector<double> fermi_table(const GameParams& params) {
  auto payoff_of = [&](int cls) {
    return cls < 5 ? static_cast<double>(cls)
                   : static_cast<double>(cls - 5) * params.b;
  };
  std::vector<double> table(100);
  for (int a = 0; a < 10; ++a) {
    for (int o = 0; o < 10; ++o) {
      table[a * 10 + o] =
          fermi_probability(payoff_of(a), payoff_of(o), params.lambda);
    }
  }
  return table;
}

void fermi_round(const Strategy* cells, int side, const double* table,
                 std::uint64_t round_key, Strategy* next) {
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) {
      const int i = r * side + c;
      int nbr[4];
      kernels::detail::cell_neighbors(side, r, c, nbr);
      const double u_pick =
          rng::unit_at(round_key, 2 * static_cast<std::uint64_t>(i));
      const int j = nbr[static_cast<int>(u_pick * 4.0)];

      int jn[4];
      kernels::detail::cell_neighbors(side, j / side, j % side, jn);
      const int count_i = static_cast<int>(cells[nbr[0]]) +
                          static_cast<int>(cells[nbr[1]]) +
                          static_cast<int>(cells[nbr[2]]) +
                          static_cast<int>(cells[nbr[3]]);
      const int count_j =
          static_cast<int>(cells[jn[0]]) + static_cast<int>(cells[jn[1]]) +
          static_cast<int>(cells[jn[2]]) + static_cast<int>(cells[jn[3]]);
      const int cls_i = count_i + (cells[i] == Strategy::Defect ? 5 : 0);
      const int cls_j = count_j + (cells[j] == Strategy::Defect ? 5 : 0);

      const double u_acc =
          rng::unit_at(round_key, 2 * static_cast<std::uint64_t>(i) + 1);
      next[i] = u_acc < table[cls_i * 10 + cls_j] ? cells[j] : cells[i];
    }
  }
}

void round_into(const Strategy* cells, int side, const GameParams& params,
                RuleKind rule, std::uint64_t round_key,
                std::vector<double>& payoff_scratch,
                const std::vector<double>& table, Strategy* next) {
  const auto n = static_cast<std::size_t>(side) * side;
  if (rule != RuleKind::Fermi) {
    payoff_scratch.resize(n);
    kernels::active().payoff_field(cells, side, params.b,
                                   payoff_scratch.data());
  }
  switch (rule) {
    case RuleKind::MonteCarlo:
      kernels::active().mc_round(cells, payoff_scratch.data(), side, round_key,
                                 next);
      break;
    case RuleKind::UnconditionalImitation:
      ui_round(cells, payoff_scratch.data(), side, round_key, next);
      break;
    case RuleKind::Replicator:
      replicator_round(cells, payoff_scratch.data(), side, params.b, round_key,
                       next);
      break;
    case RuleKind::Fermi:
      fermi_round(cells, side, table.data(), round_key, next);
      break;
  }
}

}  // namespace

Lattice step(const Lattice& lattice, const GameParams& params, RuleKind rule,
             std::uint64_t round_key) {
  params.validate();
  std::vector<Strategy> next(static_cast<std::size_t>(lattice.size()));
  std::vector<double> payoff_scratch;
  std::vector<double> table;
  if (rule == RuleKind::Fermi) table = fermi_table(params);
  round_into(lattice.data(), lattice.side(), params, rule, round_key,
             payoff_scratch, table, next.data());
  return Lattice::from_cells(lattice.side(), std::move(next));
}

Simulation::Simulation(const Lattice& initial, const GameParams& params,
                       RuleKind rule, std::uint64_t replicate_seed)
    : side_(initial.side()),
      params_(params),
      rule_(rule),
      seed_(replicate_seed),
      cells_(initial.cells()),
      next_(initial.cells().size()) {
  params_.validate();
  coop_ = kernels::active().cooperator_count(cells_.data(), size());
  if (rule_ == RuleKind::Fermi) prob_table_ = fermi_table(params_);
}

Lattice Simulation::lattice() const {
  return Lattice::from_cells(side_, cells_);
}

void Simulation::advance(int rounds) {
  for (int k = 0; k < rounds; ++k) advance_one();
}

void Simulation::advance_one() {
  // All-C and all-D are absorbing under every rule: any imitation copies the
  // strategy the cell already has. Skipping the round is exact because draws
  // are keyed by round index, never by how many draws happened before.
  if (coop_ != 0 && coop_ != size()) {
    const std::uint64_t key =
        rng::at(seed_, static_cast<std::uint64_t>(round_) + 1);
    round_into(cells_.data(), side_, params_, rule_, key, payoffs_,
               prob_table_, next_.data());
    cells_.swap(next_);
    coop_ = kernels::active().cooperator_count(cells_.data(), size());
  }
  ++round_;
}

}  // namespace mcpd
