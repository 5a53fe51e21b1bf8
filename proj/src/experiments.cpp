#include "mcpd/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>

#include "mcpd/rng.hpp"
#include "mcpd/rules.hpp"

namespace mcpd {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Replicate {
  std::vector<double> series;
  double rho_eq = 0.0;
  double return_c = kNaN;
  double return_d = kNaN;
};

Replicate run_one(const RunConfig& cfg, int index) {
  const std::uint64_t rep_seed =
      rng::at(cfg.seed, static_cast<std::uint64_t>(index));
  Lattice initial(cfg.side, cfg.pattern, rep_seed);
  Simulation sim(initial, cfg.params, cfg.rule, rep_seed);

  Replicate rep;
  rep.series.resize(static_cast<std::size_t>(cfg.rounds) + 1);
  rep.series[0] = sim.density();
  for (int t = 1; t <= cfg.rounds; ++t) {
    sim.advance();
    rep.series[static_cast<std::size_t>(t)] = sim.density();
  }

  double acc = 0.0;
  for (int t = cfg.rounds - cfg.eq_window + 1; t <= cfg.rounds; ++t) {
    acc += rep.series[static_cast<std::size_t>(t)];
  }
  rep.rho_eq = acc / cfg.eq_window;

  const auto [rc, rd] = strategy_mean_payoffs(sim.lattice(), cfg.params.b);
  rep.return_c = rc;
  rep.return_d = rd;
  return rep;
}

}  // namespace

void RunConfig::validate() const {
  if (side < 3) {
    throw std::invalid_argument("lattice side must be at least 3");
  }
  params.validate();
  if (rounds < 1) {
    throw std::invalid_argument("rounds must be at least 1");
  }
  if (eq_window < 1 || eq_window >= rounds) {
    throw std::invalid_argument(
        "equilibrium window must satisfy 1 <= eq_window < rounds");
  }
  if (replicates < 1) {
    throw std::invalid_argument("replicates must be at least 1");
  }
  if (threads < 0) {
    throw std::invalid_argument("thread count must be non-negative");
  }
}

EquilibriumStats run_replicates(const RunConfig& config) {
  config.validate();
  const int total = config.replicates;
  std::vector<Replicate> results(static_cast<std::size_t>(total));

  int workers = config.threads > 0
                    ? config.threads
                    : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, total);

  std::atomic<int> cursor{0};
  auto drain = [&] {
    for (int r; (r = cursor.fetch_add(1)) < total;) {
      results[static_cast<std::size_t>(r)] = run_one(config, r);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers) - 1);
  for (int w = 1; w < workers; ++w) pool.emplace_back(drain);
  drain();
  for (auto& th : pool) th.join();

  // Reduction in replicate order keeps outputs independent of scheduling.
  EquilibriumStats stats;
  stats.replicates = total;
  stats.series_mean.assign(static_cast<std::size_t>(config.rounds) + 1, 0.0);
  double rho_sum = 0.0;
  double c_sum = 0.0, d_sum = 0.0;
  int c_count = 0, d_count = 0;
  for (const auto& rep : results) {
    for (std::size_t t = 0; t < rep.series.size(); ++t) {
      stats.series_mean[t] += rep.series[t];
    }
    rho_sum += rep.rho_eq;
    if (!std::isnan(rep.return_c)) {
      c_sum += rep.return_c;
      ++c_count;
    }
    if (!std::isnan(rep.return_d)) {
      d_sum += rep.return_d;
      ++d_count;
    }
  }
  for (auto& v : stats.series_mean) v /= total;
  stats.rho_mean = rho_sum / total;

  double sq = 0.0;
  for (const auto& rep : results) {
    const double d = rep.rho_eq - stats.rho_mean;
    sq += d * d;
  }
  stats.rho_stddev = total > 1 ? std::sqrt(sq / (total - 1)) : 0.0;
  stats.avg_return_c = c_count > 0 ? c_sum / c_count : kNaN;
  stats.avg_return_d = d_count > 0 ? d_sum / d_count : kNaN;
  return stats;
}

std::vector<double> run_trajectory(
    const RunConfig& config, int replicate_index,
    const std::vector<int>& snapshot_rounds,
    const std::function<void(int, const Lattice&)>& on_snapshot) {
  config.validate();
  if (replicate_index < 0) {
    throw std::invalid_argument("replicate index must be non-negative");
  }
  std::vector<int> wanted = snapshot_rounds;
  std::sort(wanted.begin(), wanted.end());
  auto snap = [&](int t, const Simulation& sim) {
    if (on_snapshot &&
        std::binary_search(wanted.begin(), wanted.end(), t)) {
      on_snapshot(t, sim.lattice());
    }
  };

  const std::uint64_t rep_seed =
      rng::at(config.seed, static_cast<std::uint64_t>(replicate_index));
  Lattice initial(config.side, config.pattern, rep_seed);
  Simulation sim(initial, config.params, config.rule, rep_seed);

  std::vector<double> series(static_cast<std::size_t>(config.rounds) + 1);
  series[0] = sim.density();
  snap(0, sim);
  for (int t = 1; t <= config.rounds; ++t) {
    sim.advance();
    series[static_cast<std::size_t>(t)] = sim.density();
    snap(t, sim);
  }
  return series;
}

std::pair<double, double> strategy_mean_payoffs(const Lattice& lattice,
                                                double b) {
  const auto payoffs = compute_payoffs(lattice, b);
  double c_sum = 0.0, d_sum = 0.0;
  std::int64_t c_count = 0, d_count = 0;
  for (std::int64_t i = 0; i < lattice.size(); ++i) {
    if (lattice.data()[i] == Strategy::Cooperate) {
      c_sum += payoffs[static_cast<std::size_t>(i)];
      ++c_count;
    } else {
      d_sum += payoffs[static_cast<std::size_t>(i)];
      ++d_count;
    }
  }
  return {c_count > 0 ? c_sum / static_cast<double>(c_count) : kNaN,
          d_count > 0 ? d_sum / static_cast<double>(d_count) : kNaN};
}

double series_drift(const std::vector<double>& series, int window) {
  if (window < 1 || static_cast<std::size_t>(window) > series.size()) {
    throw std::invalid_argument("drift window out of range");
  }
  const auto begin = series.end() - window;
  const auto [lo, hi] = std::minmax_element(begin, series.end());
  return *hi - *lo;
}

std::vector<SweepPoint> sweep_b(const RunConfig& base,
                                const std::vector<double>& b_values) {
  if (b_values.empty()) {
    throw std::invalid_argument("temptation grid is empty");
  }
  std::vector<double> grid = b_values;
  std::sort(grid.begin(), grid.end());
  std::vector<SweepPoint> out;
  out.reserve(grid.size());
  for (const double b : grid) {
    if (!(b > 1.0 && b <= 2.0)) {
      throw std::invalid_argument("temptation " + std::to_string(b) +
                                  " outside (1, 2]");
    }
    RunConfig cfg = base;
    cfg.params.b = b;
    out.push_back({b, run_replicates(cfg)});
  }
  return out;
}

InvasionPattern invasion_scenario(int side, double target_fraction) {
  if (!(target_fraction > 0.0 && target_fraction < 1.0)) {
    throw std::invalid_argument("target fraction must lie in (0, 1)");
  }
  const int width = static_cast<int>(
      std::llround(side * std::sqrt(target_fraction)));
  if (width < 1 || width > side) {
    throw std::invalid_argument("target fraction " +
                                std::to_string(target_fraction) +
                                " yields no valid block on side " +
                                std::to_string(side));
  }
  const double fraction = static_cast<double>(width) * width /
                          (static_cast<double>(side) * side);
  return {InitPattern::defector_block(width), width, fraction};
}

InitPattern cluster_scenario(int side, int width) {
  if (width < 1 || width > side) {
    throw std::invalid_argument("cluster width " + std::to_string(width) +
                                " out of range for side " +
                                std::to_string(side));
  }
  return InitPattern::cooperator_block(width);
}

std::vector<Rho0Point> sweep_rho0(const RunConfig& base,
                                  const std::vector<double>& rho0_values) {
  if (rho0_values.empty()) {
    throw std::invalid_argument("initial density grid is empty");
  }
  std::vector<Rho0Point> out;
  out.reserve(rho0_values.size());
  for (const double rho0 : rho0_values) {
    if (!(rho0 > 0.0 && rho0 <= 1.0)) {
      throw std::invalid_argument("initial density " + std::to_string(rho0) +
                                  " outside (0, 1]");
    }
    RunConfig cfg = base;
    cfg.pattern = InitPattern::bernoulli(rho0);
    out.push_back({rho0, run_replicates(cfg)});
  }
  return out;
}

std::vector<PopulationPoint> sweep_population(const RunConfig& base,
                                              const std::vector<int>& sides) {
  if (sides.empty()) {
    throw std::invalid_argument("side grid is empty");
  }
  std::vector<PopulationPoint> out;
  out.reserve(sides.size());
  for (const int side : sides) {
    RunConfig cfg = base;
    cfg.side = side;
    out.push_back({side, static_cast<std::int64_t>(side) * side,
                   run_replicates(cfg)});
  }
  return out;
}

std::vector<RulePoint> compare_rules(const RunConfig& base) {
  std::vector<RulePoint> out;
  for (const RuleKind rule :
       {RuleKind::MonteCarlo, RuleKind::UnconditionalImitation,
        RuleKind::Replicator, RuleKind::Fermi}) {
    RunConfig cfg = base;
    cfg.rule = rule;
    out.push_back({rule, run_replicates(cfg)});
  }
  return out;
}

}  // namespace mcpd
