// mcpd: run lattice game experiments and analyses from the command line.
//
// Every command writes CSV artifacts plus a manifest.cfg into --out. The
// manifest holds the fully resolved settings (seeds included), is itself a
// valid config file, and feeding it back via --config reproduces the run
// bit for bit. Explicit flags override config file values.

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mcpd/config.hpp"
#include "mcpd/csv.hpp"
#include "mcpd/experiments.hpp"
#include "mcpd/fitting.hpp"
#include "mcpd/game.hpp"
#include "mcpd/kernels.hpp"
#include "mcpd/lattice.hpp"
#include "mcpd/meanfield.hpp"

namespace fs = std::filesystem;

namespace {

using namespace mcpd;

struct Opts {
  int side = 100;
  double b = 1.10;
  double lambda = 0.0625;
  double rho0 = 0.5;
  std::string rule = "mc";
  int rounds = 2000;
  int eq_window = 200;
  int replicates = 100;
  std::uint64_t seed = 0;
  CLI::Option* seed_opt = nullptr;
  int threads = 0;
  std::string backend = "auto";
  std::string out = "out";
  std::string config_file;

  std::string snapshot_rounds;
  std::string fractions = "0.04,0.0625,0.11";
  int width = 4;
  std::string rho0_values = "0.2,0.4,0.6,0.8,0.99";
  std::string sides = "10,40,60,100";
  double b_min = 1.02;
  double b_max = 1.40;
  double b_step = 0.02;
  double dt = 0.01;
  int degree = 4;
  std::string input;
  int starts = 50;
};

std::uint64_t entropy_seed() {
  std::random_device rd;
  const std::uint64_t hi = rd();
  const std::uint64_t lo = rd();
  return (hi << 32) ^ lo;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> parts;
  std::size_t begin = 0;
  while (begin <= text.size()) {
    std::size_t end = text.find(',', begin);
    if (end == std::string::npos) end = text.size();
    std::string piece = text.substr(begin, end - begin);
    const auto a = piece.find_first_not_of(" \t");
    const auto z = piece.find_last_not_of(" \t");
    parts.push_back(a == std::string::npos ? std::string()
                                           : piece.substr(a, z - a + 1));
    begin = end + 1;
  }
  return parts;
}

std::vector<double> parse_doubles(const std::string& text,
                                  const std::string& flag) {
  std::vector<double> values;
  for (const auto& piece : split_list(text)) {
    try {
      values.push_back(csv::parse_double(piece));
    } catch (const std::invalid_argument&) {
      throw config::ConfigError(
          config::ErrorKind::Type,
          flag + " expects comma-separated numbers, got '" + piece + "'");
    }
  }
  return values;
}

std::vector<int> parse_ints(const std::string& text, const std::string& flag) {
  std::vector<int> values;
  for (const auto& piece : split_list(text)) {
    int value = 0;
    const char* first = piece.data();
    const char* last = first + piece.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
      throw config::ConfigError(
          config::ErrorKind::Type,
          flag + " expects comma-separated integers, got '" + piece + "'");
    }
    values.push_back(value);
  }
  return values;
}

std::vector<int> snapshot_list(const std::string& text, int rounds) {
  if (text.empty()) return {};
  auto values = parse_ints(text, "--snapshot-rounds");
  for (int t : values) {
    if (t < 0 || t > rounds) {
      throw config::ConfigError(config::ErrorKind::Range,
                                "--snapshot-rounds entry " + std::to_string(t) +
                                    " outside [0, rounds]");
    }
  }
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  return values;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream os(path);
  if (!os) {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  return os;
}

// Registration helpers. Every option takes a value and the last occurrence
// wins, so config-file tokens (inserted first) lose to explicit flags.

void add_out_options(CLI::App* cmd, Opts& o) {
  cmd->add_option("--out", o.out, "output directory, created if absent")
      ->capture_default_str();
  cmd->add_option("--config", o.config_file,
                  "key=value config file; explicit flags override it");
}

void add_game_options(CLI::App* cmd, Opts& o, bool with_b = true) {
  if (with_b) {
    cmd->add_option("--b", o.b, "temptation payoff, in (1, 2]")
        ->capture_default_str();
  }
  cmd->add_option("--lambda", o.lambda, "fermi rule noise scale")
      ->capture_default_str();
}

void add_run_options(CLI::App* cmd, Opts& o, bool with_side = true) {
  if (with_side) {
    cmd->add_option("--l", o.side, "lattice side length")
        ->capture_default_str();
  }
  cmd->add_option("--rounds", o.rounds, "rounds per replicate")
      ->capture_default_str();
  cmd->add_option("--eq-window", o.eq_window,
                  "trailing rounds averaged into the equilibrium estimate")
      ->capture_default_str();
  cmd->add_option("--replicates", o.replicates, "independent replicates")
      ->capture_default_str();
  o.seed_opt = cmd->add_option(
      "--seed", o.seed, "master seed; omitted, one is drawn from the system");
  cmd->add_option("--threads", o.threads, "worker threads, 0 = all cores")
      ->capture_default_str();
  cmd->add_option("--backend", o.backend, "compute backend: auto, scalar, avx2")
      ->capture_default_str();
}

void add_rule_option(CLI::App* cmd, Opts& o) {
  cmd->add_option("--rule", o.rule,
                  "update rule: mc, ui, replicator, fermi")
      ->capture_default_str();
}

void add_rho0_option(CLI::App* cmd, Opts& o) {
  cmd->add_option("--rho0", o.rho0, "initial cooperator density")
      ->capture_default_str();
}

// Flag-level validation failures surface as range errors.
RunConfig base_config(const Opts& o) {
  RunConfig cfg;
  cfg.side = o.side;
  cfg.rule = rule_from_string(o.rule);
  try {
    cfg.params = GameParams{o.b, o.lambda};
    cfg.pattern = InitPattern::bernoulli(o.rho0);
    cfg.rounds = o.rounds;
    cfg.eq_window = o.eq_window;
    cfg.replicates = o.replicates;
    cfg.seed = o.seed;
    cfg.threads = o.threads;
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw config::ConfigError(config::ErrorKind::Range, e.what());
  }
  return cfg;
}

// Resolve the seed, pick the kernel backend, make the output directory.
void prepare(Opts& o, bool needs_kernels = true) {
  if (o.seed_opt != nullptr && o.seed_opt->count() == 0) {
    o.seed = entropy_seed();
  }
  if (needs_kernels) {
    kernels::select_backend(kernels::backend_from_string(o.backend));
  }
  fs::create_directories(o.out);
}

void write_manifest(const Opts& o, const std::string& command,
                    config::Entries settings) {
  std::sort(settings.begin(), settings.end());
  config::Entries entries;
  entries.emplace_back("command", command);
  entries.insert(entries.end(), settings.begin(), settings.end());
  config::write_manifest_file((fs::path(o.out) / "manifest.cfg").string(),
                              entries);
}

config::Entries run_entries(const Opts& o, bool with_side = true) {
  config::Entries e;
  if (with_side) e.emplace_back("l", std::to_string(o.side));
  e.emplace_back("lambda", csv::format_double(o.lambda));
  e.emplace_back("rounds", std::to_string(o.rounds));
  e.emplace_back("eq-window", std::to_string(o.eq_window));
  e.emplace_back("replicates", std::to_string(o.replicates));
  e.emplace_back("seed", std::to_string(o.seed));
  e.emplace_back("threads", std::to_string(o.threads));
  e.emplace_back("backend", o.backend);
  e.emplace_back("out", o.out);
  return e;
}

void write_series_csv(const fs::path& path, const std::vector<double>& series) {
  auto os = open_output(path);
  csv::write_row(os, {"t", "rho"});
  for (std::size_t t = 0; t < series.size(); ++t) {
    csv::write_row(os, {std::to_string(t), csv::format_double(series[t])});
  }
}

void write_summary_csv(const fs::path& path, const EquilibriumStats& stats) {
  auto os = open_output(path);
  csv::write_row(os, {"rho_mean", "rho_stddev", "avg_return_c", "avg_return_d",
                      "replicates"});
  csv::write_row(os, {csv::format_double(stats.rho_mean),
                      csv::format_double(stats.rho_stddev),
                      csv::format_double(stats.avg_return_c),
                      csv::format_double(stats.avg_return_d),
                      std::to_string(stats.replicates)});
}

// Snapshot callback writing <out>/<prefix>_roundNNNN.pgm.
std::function<void(int, const Lattice&)> snapshot_writer(
    const std::string& out, const std::string& prefix) {
  return [out, prefix](int t, const Lattice& lattice) {
    char name[128];
    std::snprintf(name, sizeof name, "%s_round%04d.pgm", prefix.c_str(), t);
    write_pgm(lattice, (fs::path(out) / name).string());
  };
}

int run_simulate(Opts& o) {
  prepare(o);
  const RunConfig cfg = base_config(o);
  const auto snapshots = snapshot_list(o.snapshot_rounds, o.rounds);

  const EquilibriumStats stats = run_replicates(cfg);
  write_series_csv(fs::path(o.out) / "series.csv", stats.series_mean);
  write_summary_csv(fs::path(o.out) / "summary.csv", stats);
  if (!snapshots.empty()) {
    run_trajectory(cfg, 0, snapshots, snapshot_writer(o.out, "snapshot"));
  }

  auto entries = run_entries(o);
  entries.emplace_back("b", csv::format_double(o.b));
  entries.emplace_back("rho0", csv::format_double(o.rho0));
  entries.emplace_back("rule", o.rule);
  entries.emplace_back("snapshot-rounds", o.snapshot_rounds);
  write_manifest(o, "simulate", std::move(entries));

  std::cout << "rho_mean=" << csv::format_double(stats.rho_mean) << " over "
            << stats.replicates << " replicates; wrote " << o.out << "/\n";
  return 0;
}

int run_sweep_b(Opts& o) {
  prepare(o);
  if (!(o.b_step > 0.0) || o.b_max < o.b_min) {
    throw config::ConfigError(config::ErrorKind::Range,
                              "need --b-step > 0 and --b-min <= --b-max");
  }
  RunConfig cfg = base_config(o);

  std::vector<double> grid;
  const int count =
      static_cast<int>(std::floor((o.b_max - o.b_min) / o.b_step + 1e-9)) + 1;
  for (int k = 0; k < count; ++k) {
    double value = o.b_min + k * o.b_step;
    if (o.b_step >= 1e-6) value = std::round(value * 1e9) / 1e9;
    grid.push_back(value);
  }

  std::vector<SweepPoint> points;
  try {
    points = sweep_b(cfg, grid);
  } catch (const std::invalid_argument& e) {
    throw config::ConfigError(config::ErrorKind::Range, e.what());
  }

  auto os = open_output(fs::path(o.out) / "sweep.csv");
  csv::write_row(os, {"b", "rho_mean", "rho_stddev", "avg_return_c",
                      "avg_return_d"});
  for (const auto& p : points) {
    csv::write_row(os, {csv::format_double(p.b),
                        csv::format_double(p.stats.rho_mean),
                        csv::format_double(p.stats.rho_stddev),
                        csv::format_double(p.stats.avg_return_c),
                        csv::format_double(p.stats.avg_return_d)});
  }

  auto entries = run_entries(o);
  entries.emplace_back("b-min", csv::format_double(o.b_min));
  entries.emplace_back("b-max", csv::format_double(o.b_max));
  entries.emplace_back("b-step", csv::format_double(o.b_step));
  entries.emplace_back("rho0", csv::format_double(o.rho0));
  entries.emplace_back("rule", o.rule);
  write_manifest(o, "sweep-b", std::move(entries));

  std::cout << "swept " << points.size() << " temptation values; wrote "
            << o.out << "/sweep.csv\n";
  return 0;
}

int run_invade(Opts& o) {
  prepare(o);
  RunConfig cfg = base_config(o);
  const auto fractions = parse_doubles(o.fractions, "--fractions");

  auto os = open_output(fs::path(o.out) / "invade.csv");
  csv::write_row(os, {"fraction", "width", "realized_fraction", "rho_mean",
                      "rho_stddev"});
  for (double f : fractions) {
    InvasionPattern inv;
    try {
      inv = invasion_scenario(o.side, f);
    } catch (const std::invalid_argument& e) {
      throw config::ConfigError(config::ErrorKind::Range, e.what());
    }
    cfg.pattern = inv.pattern;
    const EquilibriumStats stats = run_replicates(cfg);
    csv::write_row(os, {csv::format_double(f), std::to_string(inv.width),
                        csv::format_double(inv.fraction),
                        csv::format_double(stats.rho_mean),
                        csv::format_double(stats.rho_stddev)});
    run_trajectory(cfg, 0, {0, o.rounds},
                   snapshot_writer(o.out, "invade_w" +
                                              std::to_string(inv.width)));
  }

  auto entries = run_entries(o);
  entries.emplace_back("b", csv::format_double(o.b));
  entries.emplace_back("fractions", o.fractions);
  entries.emplace_back("rule", o.rule);
  write_manifest(o, "invade", std::move(entries));

  std::cout << "ran " << fractions.size() << " invasion scenarios; wrote "
            << o.out << "/invade.csv\n";
  return 0;
}

int run_cluster(Opts& o) {
  prepare(o);
  RunConfig cfg = base_config(o);
  try {
    cfg.pattern = cluster_scenario(o.side, o.width);
  } catch (const std::invalid_argument& e) {
    throw config::ConfigError(config::ErrorKind::Range, e.what());
  }
  const auto snapshots = snapshot_list(o.snapshot_rounds, o.rounds);

  const EquilibriumStats stats = run_replicates(cfg);
  write_series_csv(fs::path(o.out) / "series.csv", stats.series_mean);
  write_summary_csv(fs::path(o.out) / "summary.csv", stats);
  if (!snapshots.empty()) {
    run_trajectory(cfg, 0, snapshots, snapshot_writer(o.out, "cluster"));
  }

  auto entries = run_entries(o);
  entries.emplace_back("b", csv::format_double(o.b));
  entries.emplace_back("rule", o.rule);
  entries.emplace_back("snapshot-rounds", o.snapshot_rounds);
  entries.emplace_back("width", std::to_string(o.width));
  write_manifest(o, "cluster", std::move(entries));

  std::cout << "rho_mean=" << csv::format_double(stats.rho_mean) << " from a "
            << o.width << "x" << o.width << " seed cluster; wrote " << o.out
            << "/\n";
  return 0;
}

int run_sweep_rho0(Opts& o) {
  prepare(o);
  RunConfig cfg = base_config(o);
  const auto values = parse_doubles(o.rho0_values, "--rho0-values");

  std::vector<Rho0Point> points;
  try {
    points = sweep_rho0(cfg, values);
  } catch (const std::invalid_argument& e) {
    throw config::ConfigError(config::ErrorKind::Range, e.what());
  }

  auto os = open_output(fs::path(o.out) / "rho0.csv");
  csv::write_row(os, {"rho0", "rho_mean", "rho_stddev"});
  for (const auto& p : points) {
    csv::write_row(os, {csv::format_double(p.rho0),
                        csv::format_double(p.stats.rho_mean),
                        csv::format_double(p.stats.rho_stddev)});
  }

  auto series = open_output(fs::path(o.out) / "rho0_series.csv");
  std::vector<std::string> header{"t"};
  for (const auto& p : points) {
    header.push_back("rho_" + csv::format_double(p.rho0));
  }
  csv::write_row(series, header);
  for (int t = 0; t <= o.rounds; ++t) {
    std::vector<std::string> row{std::to_string(t)};
    for (const auto& p : points) {
      row.push_back(csv::format_double(
          p.stats.series_mean[static_cast<std::size_t>(t)]));
    }
    csv::write_row(series, row);
  }

  auto entries = run_entries(o);
  entries.emplace_back("b", csv::format_double(o.b));
  entries.emplace_back("rho0-values", o.rho0_values);
  entries.emplace_back("rule", o.rule);
  write_manifest(o, "sweep-rho0", std::move(entries));

  std::cout << "swept " << points.size() << " initial densities; wrote "
            << o.out << "/rho0.csv\n";
  return 0;
}

int run_sweep_n(Opts& o) {
  prepare(o);
  RunConfig cfg = base_config(o);
  const auto sides = parse_ints(o.sides, "--sides");

  std::vector<PopulationPoint> points;
  try {
    points = sweep_population(cfg, sides);
  } catch (const std::invalid_argument& e) {
    throw config::ConfigError(config::ErrorKind::Range, e.what());
  }

  auto os = open_output(fs::path(o.out) / "population.csv");
  csv::write_row(os, {"l", "n", "rho_mean", "rho_stddev"});
  for (const auto& p : points) {
    csv::write_row(os, {std::to_string(p.side), std::to_string(p.population),
                        csv::format_double(p.stats.rho_mean),
                        csv::format_double(p.stats.rho_stddev)});
  }

  auto entries = run_entries(o, /*with_side=*/false);
  entries.emplace_back("b", csv::format_double(o.b));
  entries.emplace_back("rho0", csv::format_double(o.rho0));
  entries.emplace_back("rule", o.rule);
  entries.emplace_back("sides", o.sides);
  write_manifest(o, "sweep-n", std::move(entries));

  std::cout << "swept " << points.size() << " population sizes; wrote "
            << o.out << "/population.csv\n";
  return 0;
}

int run_compare_rules(Opts& o) {
  prepare(o);
  const RunConfig cfg = base_config(o);
  const auto points = compare_rules(cfg);

  auto os = open_output(fs::path(o.out) / "rules.csv");
  csv::write_row(os, {"rule", "rho_mean", "rho_stddev", "avg_return_c",
                      "avg_return_d"});
  for (const auto& p : points) {
    csv::write_row(os, {to_string(p.rule),
                        csv::format_double(p.stats.rho_mean),
                        csv::format_double(p.stats.rho_stddev),
                        csv::format_double(p.stats.avg_return_c),
                        csv::format_double(p.stats.avg_return_d)});
  }

  auto entries = run_entries(o);
  entries.emplace_back("b", csv::format_double(o.b));
  entries.emplace_back("rho0", csv::format_double(o.rho0));
  write_manifest(o, "compare-rules", std::move(entries));

  std::cout << "compared " << points.size() << " update rules; wrote "
            << o.out << "/rules.csv\n";
  return 0;
}

int run_meanfield(Opts& o) {
  prepare(o, /*needs_kernels=*/false);
  std::vector<MeanFieldState> states;
  try {
    states = mf_integrate(o.rho0, o.b, o.degree, o.dt, o.rounds);
  } catch (const std::invalid_argument& e) {
    throw config::ConfigError(config::ErrorKind::Range, e.what());
  }

  auto os = open_output(fs::path(o.out) / "meanfield.csv");
  csv::write_row(os, {"t", "rho"});
  for (const auto& s : states) {
    csv::write_row(os, {csv::format_double(s.t), csv::format_double(s.rho)});
  }

  config::Entries entries;
  entries.emplace_back("b", csv::format_double(o.b));
  entries.emplace_back("d", std::to_string(o.degree));
  entries.emplace_back("dt", csv::format_double(o.dt));
  entries.emplace_back("out", o.out);
  entries.emplace_back("rho0", csv::format_double(o.rho0));
  entries.emplace_back("rounds", std::to_string(o.rounds));
  write_manifest(o, "meanfield", std::move(entries));

  std::cout << "integrated " << o.rounds << " rounds, final rho="
            << csv::format_double(states.back().rho) << "; wrote " << o.out
            << "/meanfield.csv\n";
  return 0;
}

int run_fit(Opts& o) {
  prepare(o, /*needs_kernels=*/false);
  const csv::Table table = csv::read_table_file(o.input);
  const auto bcol = table.column("b");
  const auto rcol = table.column("rho_mean");
  std::vector<double> xs, ys;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    xs.push_back(table.number(r, bcol));
    ys.push_back(table.number(r, rcol));
  }

  const auto fits = compare_fits(xs, ys, o.starts, o.seed);

  auto os = open_output(fs::path(o.out) / "fit.csv");
  csv::write_row(os, {"family", "p1", "p2", "p3", "p4", "rmse", "goodness"});
  for (const auto& fit : fits) {
    std::vector<std::string> row{to_string(fit.model.family)};
    for (std::size_t i = 0; i < 4; ++i) {
      row.push_back(i < fit.model.params.size()
                        ? csv::format_double(fit.model.params[i])
                        : std::string());
    }
    row.push_back(csv::format_double(fit.rmse));
    row.push_back(csv::format_double(fit.goodness));
    csv::write_row(os, row);
    std::cout << to_string(fit.model.family)
              << ": rmse=" << csv::format_double(fit.rmse)
              << " goodness=" << csv::format_double(fit.goodness) << "\n";
  }

  config::Entries entries;
  entries.emplace_back("input", o.input);
  entries.emplace_back("out", o.out);
  entries.emplace_back("seed", std::to_string(o.seed));
  entries.emplace_back("starts", std::to_string(o.starts));
  write_manifest(o, "fit", std::move(entries));
  return 0;
}

// Expands the last --config occurrence into --key=value tokens placed right
// after the command name, so explicit flags keep precedence under the
// take-last policy. Keys must belong to the invoked command.
void merge_config_tokens(const std::map<std::string, CLI::App*>& commands,
                         std::vector<std::string>& args) {
  if (args.empty()) return;
  const auto found = commands.find(args.front());
  if (found == commands.end()) return;  // parser reports the unknown command
  CLI::App* cmd = found->second;

  std::string path;
  bool have = false;
  for (std::size_t i = 1; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a == "--config") {
      if (i + 1 >= args.size()) return;  // parser reports the missing value
      path = args[++i];
      have = true;
    } else if (a.rfind("--config=", 0) == 0) {
      path = a.substr(9);
      have = true;
    }
  }
  if (!have) return;

  std::set<std::string> allowed;
  for (const CLI::Option* option : cmd->get_options()) {
    for (const auto& name : option->get_lnames()) allowed.insert(name);
  }
  allowed.erase("help");
  allowed.erase("config");

  std::vector<std::string> synthesized;
  for (const auto& [key, value] : config::load_file(path)) {
    if (key == "command") {
      if (value != args.front()) {
        throw config::ConfigError(config::ErrorKind::Command,
                                  "config is for command '" + value +
                                      "', invoked '" + args.front() + "'");
      }
      continue;
    }
    if (allowed.find(key) == allowed.end()) {
      throw config::ConfigError(config::ErrorKind::UnknownKey,
                                "key '" + key + "' is not a setting of '" +
                                    args.front() + "'");
    }
    synthesized.push_back("--" + key + "=" + value);
  }
  args.insert(args.begin() + 1, synthesized.begin(), synthesized.end());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lattice game simulator and analysis toolkit", "mcpd"};
  app.require_subcommand(0, 1);

  std::map<std::string, CLI::App*> commands;
  std::map<std::string, std::pair<Opts, int (*)(Opts&)>> handlers;
  const auto make = [&](const std::string& name, const std::string& desc,
                        int (*handler)(Opts&)) {
    CLI::App* cmd = app.add_subcommand(name, desc);
    cmd->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    commands[name] = cmd;
    handlers[name] = {Opts{}, handler};
    return cmd;
  };

  {
    CLI::App* cmd = make("simulate", "replicated run from a random mix",
                         &run_simulate);
    Opts& o = handlers["simulate"].first;
    add_run_options(cmd, o);
    add_game_options(cmd, o);
    add_rule_option(cmd, o);
    add_rho0_option(cmd, o);
    cmd->add_option("--snapshot-rounds", o.snapshot_rounds,
                    "comma-separated rounds to dump as PGM snapshots");
    add_out_options(cmd, o);
  }
  {
    CLI::App* cmd = make("sweep-b", "equilibrium density across a temptation grid",
                         &run_sweep_b);
    Opts& o = handlers["sweep-b"].first;
    add_run_options(cmd, o);
    add_game_options(cmd, o, /*with_b=*/false);
    add_rule_option(cmd, o);
    add_rho0_option(cmd, o);
    cmd->add_option("--b-min", o.b_min, "first temptation value")
        ->capture_default_str();
    cmd->add_option("--b-max", o.b_max, "last temptation value")
        ->capture_default_str();
    cmd->add_option("--b-step", o.b_step, "grid spacing")
        ->capture_default_str();
    add_out_options(cmd, o);
  }
  {
    CLI::App* cmd = make("invade",
                         "defector blocks dropped into a cooperator lattice",
                         &run_invade);
    Opts& o = handlers["invade"].first;
    add_run_options(cmd, o);
    add_game_options(cmd, o);
    add_rule_option(cmd, o);
    cmd->add_option("--fractions", o.fractions,
                    "comma-separated defector population fractions")
        ->capture_default_str();
    add_out_options(cmd, o);
  }
  {
    CLI::App* cmd = make("cluster",
                         "cooperator block seeded into a defector lattice",
                         &run_cluster);
    Opts& o = handlers["cluster"].first;
    o.snapshot_rounds = "0,100,500,1000,2000";
    add_run_options(cmd, o);
    add_game_options(cmd, o);
    add_rule_option(cmd, o);
    cmd->add_option("--width", o.width, "seed cluster side length")
        ->capture_default_str();
    cmd->add_option("--snapshot-rounds", o.snapshot_rounds,
                    "comma-separated rounds to dump as PGM snapshots")
        ->capture_default_str();
    add_out_options(cmd, o);
  }
  {
    CLI::App* cmd = make("sweep-rho0",
                         "equilibrium density across initial densities",
                         &run_sweep_rho0);
    Opts& o = handlers["sweep-rho0"].first;
    add_run_options(cmd, o);
    add_game_options(cmd, o);
    add_rule_option(cmd, o);
    cmd->add_option("--rho0-values", o.rho0_values,
                    "comma-separated initial cooperator densities")
        ->capture_default_str();
    add_out_options(cmd, o);
  }
  {
    CLI::App* cmd = make("sweep-n", "equilibrium density across lattice sizes",
                         &run_sweep_n);
    Opts& o = handlers["sweep-n"].first;
    add_run_options(cmd, o, /*with_side=*/false);
    add_game_options(cmd, o);
    add_rule_option(cmd, o);
    add_rho0_option(cmd, o);
    cmd->add_option("--sides", o.sides, "comma-separated lattice side lengths")
        ->capture_default_str();
    add_out_options(cmd, o);
  }
  {
    CLI::App* cmd = make("compare-rules",
                         "all four update rules on identical seeds",
                         &run_compare_rules);
    Opts& o = handlers["compare-rules"].first;
    add_run_options(cmd, o);
    add_game_options(cmd, o);
    add_rho0_option(cmd, o);
    add_out_options(cmd, o);
  }
  {
    CLI::App* cmd = make("meanfield", "well-mixed ODE density trajectory",
                         &run_meanfield);
    Opts& o = handlers["meanfield"].first;
    o.rounds = 1000;
    cmd->add_option("--b", o.b, "temptation payoff, in (1, 2]")
        ->capture_default_str();
    add_rho0_option(cmd, o);
    cmd->add_option("--d", o.degree, "neighbors per player")
        ->capture_default_str();
    cmd->add_option("--dt", o.dt, "integration step, snapped to divide 1")
        ->capture_default_str();
    cmd->add_option("--rounds", o.rounds, "rounds to integrate")
        ->capture_default_str();
    add_out_options(cmd, o);
  }
  {
    CLI::App* cmd = make("fit", "least-squares curve fits of a density sweep",
                         &run_fit);
    Opts& o = handlers["fit"].first;
    cmd->add_option("--input", o.input,
                    "CSV with b and rho_mean columns, as sweep-b writes")
        ->required();
    cmd->add_option("--starts", o.starts, "random starts per family")
        ->capture_default_str();
    o.seed_opt = cmd->add_option(
        "--seed", o.seed, "master seed; omitted, one is drawn from the system");
    add_out_options(cmd, o);
  }

  std::vector<std::string> args(argv + 1, argv + argc);
  if (args.empty()) {
    std::cerr << app.help();
    return 1;
  }
  const std::string command = args.front();

  try {
    merge_config_tokens(commands, args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
    const auto parsed = handlers.find(command);
    if (parsed == handlers.end()) return 1;
    auto& [opts, handler] = parsed->second;
    return handler(opts);
  } catch (const CLI::CallForHelp&) {
    const auto parsed = app.get_subcommands();
    std::cout << (parsed.empty() ? app.help() : parsed.front()->help());
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ConversionError& e) {
    std::cerr << "error: type-error: " << e.what() << '\n';
    return 1;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return 0;
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const mcpd::config::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
