#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "mcpd/experiments.hpp"
#include "mcpd/rng.hpp"
#include "mcpd/rules.hpp"

using namespace mcpd;

namespace {

RunConfig small_config() {
  RunConfig cfg;
  cfg.side = 10;
  cfg.rounds = 40;
  cfg.eq_window = 10;
  cfg.replicates = 6;
  cfg.seed = 5;
  cfg.threads = 1;
  return cfg;
}

bool stats_equal(const EquilibriumStats& a, const EquilibriumStats& b) {
  return a.rho_mean == b.rho_mean && a.rho_stddev == b.rho_stddev &&
         a.series_mean == b.series_mean &&
         (a.avg_return_c == b.avg_return_c ||
          (std::isnan(a.avg_return_c) && std::isnan(b.avg_return_c))) &&
         (a.avg_return_d == b.avg_return_d ||
          (std::isnan(a.avg_return_d) && std::isnan(b.avg_return_d))) &&
         a.replicates == b.replicates;
}

}  // namespace

TEST_CASE("config validation rejects out-of-range settings") {
  RunConfig cfg = small_config();
  cfg.side = 2;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = small_config();
  cfg.eq_window = cfg.rounds;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = small_config();
  cfg.replicates = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = small_config();
  cfg.threads = -1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  CHECK_NOTHROW(small_config().validate());
}

TEST_CASE("an all-defector start is exactly absorbing") {
  RunConfig cfg = small_config();
  cfg.pattern = InitPattern::bernoulli(0.0);
  const auto stats = run_replicates(cfg);
  CHECK(stats.rho_mean == 0.0);
  CHECK(stats.rho_stddev == 0.0);
  CHECK(stats.avg_return_d == 0.0);
  CHECK(std::isnan(stats.avg_return_c));
  for (const double rho : stats.series_mean) CHECK(rho == 0.0);
}

TEST_CASE("an all-cooperator start is exactly absorbing") {
  RunConfig cfg = small_config();
  cfg.pattern = InitPattern::bernoulli(1.0);
  const auto stats = run_replicates(cfg);
  CHECK(stats.rho_mean == 1.0);
  CHECK(stats.rho_stddev == 0.0);
  CHECK(stats.avg_return_c == 4.0);  // four cooperating neighbors each
  CHECK(std::isnan(stats.avg_return_d));
}

TEST_CASE("results are independent of the worker count") {
  RunConfig cfg = small_config();
  cfg.threads = 1;
  const auto serial = run_replicates(cfg);
  cfg.threads = 4;
  const auto parallel = run_replicates(cfg);
  CHECK(stats_equal(serial, parallel));
}

TEST_CASE("rerunning a config reproduces every statistic bitwise") {
  const RunConfig cfg = small_config();
  CHECK(stats_equal(run_replicates(cfg), run_replicates(cfg)));
}

TEST_CASE("the series has rounds+1 entries and starts at the seed density") {
  const RunConfig cfg = small_config();
  const auto stats = run_replicates(cfg);
  REQUIRE(stats.series_mean.size() == static_cast<std::size_t>(cfg.rounds) + 1);
  CHECK(stats.series_mean.front() > 0.3);
  CHECK(stats.series_mean.front() < 0.7);
}

TEST_CASE("a single replicate reduces to its own trajectory") {
  RunConfig cfg = small_config();
  cfg.replicates = 1;
  const auto stats = run_replicates(cfg);
  const auto series = run_trajectory(cfg, 0);
  REQUIRE(series.size() == stats.series_mean.size());
  for (std::size_t t = 0; t < series.size(); ++t) {
    CHECK(series[t] == stats.series_mean[t]);
  }
  double acc = 0.0;
  for (int t = cfg.rounds - cfg.eq_window + 1; t <= cfg.rounds; ++t) {
    acc += series[static_cast<std::size_t>(t)];
  }
  CHECK(stats.rho_mean == acc / cfg.eq_window);
  CHECK(stats.rho_stddev == 0.0);
}

TEST_CASE("snapshots arrive exactly at the requested rounds") {
  const RunConfig cfg = small_config();
  std::vector<int> seen;
  std::vector<double> at_snapshot;
  const auto series =
      run_trajectory(cfg, 0, {0, 7, 40}, [&](int t, const Lattice& lattice) {
        seen.push_back(t);
        at_snapshot.push_back(lattice.cooperator_density());
      });
  CHECK(seen == std::vector<int>{0, 7, 40});
  for (std::size_t k = 0; k < seen.size(); ++k) {
    CHECK(at_snapshot[k] == series[static_cast<std::size_t>(seen[k])]);
  }
  CHECK_THROWS_AS(run_trajectory(cfg, -1), std::invalid_argument);
}

TEST_CASE("per-strategy returns come from the payoff field") {
  // 3x3 with one cooperator: it earns 0, each of its four defector
  // neighbors earns b, the remaining four defectors earn 0
  std::vector<Strategy> cells(9, Strategy::Defect);
  cells[4] = Strategy::Cooperate;
  const auto lattice = Lattice::from_cells(3, std::move(cells));
  const auto [rc, rd] = strategy_mean_payoffs(lattice, 1.25);
  CHECK(rc == 0.0);
  CHECK(rd == doctest::Approx(4 * 1.25 / 8).epsilon(1e-15));

  const Lattice pure(3, InitPattern::bernoulli(0.0), 1);
  const auto [nc, nd] = strategy_mean_payoffs(pure, 1.25);
  CHECK(std::isnan(nc));
  CHECK(nd == 0.0);
}

TEST_CASE("drift is the spread over the trailing window") {
  const std::vector<double> series{5.0, 1.0, 2.0, 4.0, 3.0};
  CHECK(series_drift(series, 2) == 1.0);
  CHECK(series_drift(series, 4) == 3.0);
  CHECK(series_drift(series, 5) == 4.0);
  CHECK_THROWS_AS(series_drift(series, 0), std::invalid_argument);
  CHECK_THROWS_AS(series_drift(series, 6), std::invalid_argument);
}

TEST_CASE("temptation sweeps are sorted and validated") {
  RunConfig cfg = small_config();
  cfg.rounds = 20;
  cfg.eq_window = 5;
  cfg.replicates = 2;
  const auto points = sweep_b(cfg, {1.2, 1.05});
  REQUIRE(points.size() == 2);
  CHECK(points[0].b == 1.05);
  CHECK(points[1].b == 1.2);
  CHECK_THROWS_AS(sweep_b(cfg, {}), std::invalid_argument);
  CHECK_THROWS_AS(sweep_b(cfg, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(sweep_b(cfg, {2.5}), std::invalid_argument);
}

TEST_CASE("invasion blocks are sized by the square root of the fraction") {
  CHECK(invasion_scenario(100, 0.04).width == 20);
  CHECK(invasion_scenario(100, 0.0625).width == 25);
  const auto third = invasion_scenario(100, 0.11);
  CHECK(third.width == 33);
  CHECK(third.fraction == doctest::Approx(0.1089).epsilon(1e-15));
  CHECK(third.pattern.kind == InitPattern::Kind::DefectorBlock);
  CHECK_THROWS_AS(invasion_scenario(100, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(invasion_scenario(100, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(invasion_scenario(100, 1e-9), std::invalid_argument);
}

TEST_CASE("cluster scenarios place a cooperator block") {
  const auto pattern = cluster_scenario(9, 3);
  CHECK(pattern.kind == InitPattern::Kind::CooperatorBlock);
  CHECK(pattern.width == 3);
  CHECK_THROWS_AS(cluster_scenario(9, 10), std::invalid_argument);
  CHECK_THROWS_AS(cluster_scenario(9, 0), std::invalid_argument);
}

TEST_CASE("initial density sweeps keep the given order and range") {
  RunConfig cfg = small_config();
  cfg.rounds = 20;
  cfg.eq_window = 5;
  cfg.replicates = 2;
  const auto points = sweep_rho0(cfg, {0.8, 0.2});
  REQUIRE(points.size() == 2);
  CHECK(points[0].rho0 == 0.8);
  CHECK(points[1].rho0 == 0.2);
  CHECK_THROWS_AS(sweep_rho0(cfg, {0.0}), std::invalid_argument);
  CHECK_THROWS_AS(sweep_rho0(cfg, {1.1}), std::invalid_argument);
}

TEST_CASE("population sweeps record side and population") {
  RunConfig cfg = small_config();
  cfg.rounds = 20;
  cfg.eq_window = 5;
  cfg.replicates = 2;
  const auto points = sweep_population(cfg, {4, 6});
  REQUIRE(points.size() == 2);
  CHECK(points[0].side == 4);
  CHECK(points[0].population == 16);
  CHECK(points[1].population == 36);
  CHECK_THROWS_AS(sweep_population(cfg, {2}), std::invalid_argument);
  CHECK_THROWS_AS(sweep_population(cfg, {}), std::invalid_argument);
}

TEST_CASE("rule comparison runs all four rules on identical seeds") {
  RunConfig cfg = small_config();
  cfg.rounds = 20;
  cfg.eq_window = 5;
  cfg.replicates = 2;
  const auto points = compare_rules(cfg);
  REQUIRE(points.size() == 4);
  CHECK(points[0].rule == RuleKind::MonteCarlo);
  CHECK(points[1].rule == RuleKind::UnconditionalImitation);
  CHECK(points[2].rule == RuleKind::Replicator);
  CHECK(points[3].rule == RuleKind::Fermi);

  RunConfig mc = cfg;
  mc.rule = RuleKind::MonteCarlo;
  CHECK(stats_equal(points[0].stats, run_replicates(mc)));
}
