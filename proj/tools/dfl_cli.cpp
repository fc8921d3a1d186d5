#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "dfl/csv.hpp"
#include "dfl/errors.hpp"
#include "dfl/harness.hpp"
#include "dfl/metrics.hpp"

namespace {

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    if (cell.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(cell, &used));
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw dfl::ConfigError("bad grid value '" + cell + "'");
    }
  }
  return out;
}

struct Overrides {
  int T = 0;
  int runs = 0;
  std::string out;
  long long seed = -1;
  bool serial = false;
};

dfl::ExperimentConfig load(const std::string& path, const Overrides& o) {
  dfl::ExperimentConfig cfg = dfl::load_config(path);
  if (o.T != 0) cfg.T = o.T;
  if (o.runs != 0) cfg.n_runs = o.runs;
  if (!o.out.empty()) cfg.output_dir = o.out;
  if (o.seed >= 0) cfg.base_seed = static_cast<std::uint64_t>(o.seed);
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online decision-focused learning benchmark"};
  app.require_subcommand(1);

  std::string config;
  Overrides ov;
  auto* run = app.add_subcommand("run", "Run every configured learner on seeded streams");
  run->add_option("--config", config, "JSON config")->required();
  run->add_option("--T", ov.T, "Horizon override");
  run->add_option("--runs", ov.runs, "Number of seeds override");
  run->add_option("--out", ov.out, "Output directory override");
  run->add_option("--seed", ov.seed, "Base seed override");
  run->add_flag("--serial", ov.serial, "Run seeds sequentially");

  int d = 3, m = 2, points = 20;
  long samples = 100000;
  double eps_lo = 1e-3, eps_hi = 1e-1;
  unsigned long long mseed = 0;
  auto* margin = app.add_subcommand("margin-check", "Monte-Carlo check of the margin bound");
  margin->add_option("--d", d, "Decision dimension")->required();
  margin->add_option("--m", m, "Parameter dimension")->required();
  margin->add_option("--samples", samples, "Monte-Carlo samples")->required();
  margin->add_option("--eps-min", eps_lo, "Smallest epsilon");
  margin->add_option("--eps-max", eps_hi, "Largest epsilon");
  margin->add_option("--points", points, "Log-grid size");
  margin->add_option("--seed", mseed, "Seed");

  std::string grid;
  auto* sweep = app.add_subcommand("sweep-gamma", "Cost gap between PF-OGD and DF-OGD over gamma");
  sweep->add_option("--config", config, "JSON config")->required();
  sweep->add_option("--grid", grid, "Comma-separated gamma values")->required();
  sweep->add_option("--T", ov.T, "Horizon override");
  sweep->add_option("--runs", ov.runs, "Number of seeds override");
  sweep->add_option("--out", ov.out, "Output directory override");
  sweep->add_option("--seed", ov.seed, "Base seed override");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*run) {
      const dfl::ExperimentConfig cfg = load(config, ov);
      const dfl::ExperimentResult res = dfl::run_experiment(cfg, {!ov.serial, true});
      int failed = 0;
      for (const auto& r : res.runs)
        for (const auto& l : r.learners) failed += l.failed;
      std::cout << "wrote " << res.files.size() + 1 << " files to " << cfg.output_dir
                << " in " << res.wall_seconds << " s";
      if (failed) std::cout << " (" << failed << " failed learner runs)";
      std::cout << '\n';
    } else if (*margin) {
      if (samples < 10000) throw dfl::ConfigError("--samples must be >= 10000");
      const auto rows = dfl::margin_constant_check(d, m, samples,
                                                   dfl::log_grid(eps_lo, eps_hi, points), mseed);
      dfl::CsvWriter w(std::cout);
      w.header({"epsilon", "empirical", "bound", "std_error"});
      for (const auto& r : rows) w.row(r.epsilon, {r.empirical, r.bound, r.std_error});
    } else if (*sweep) {
      const dfl::ExperimentConfig cfg = load(config, ov);
      const auto rows = dfl::sweep_gamma(cfg, parse_grid(grid));
      dfl::CsvWriter w(std::cout);
      w.header({"gamma", "mean_gap", "ci_half_width"});
      for (const auto& r : rows) w.row(r.gamma, {r.mean_gap, r.ci_half_width});
    }
  } catch (const dfl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const dfl::InvalidInput& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
