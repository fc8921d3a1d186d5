#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "dfl/env.hpp"
#include "dfl/learners.hpp"
#include "dfl/metrics.hpp"

namespace dfl {

enum class LearnerKind { DfOgd, DfFtpl, PfOgd, SpoPlus };

struct LearnerSpec {
  LearnerKind kind = LearnerKind::DfOgd;
  std::string name;  // unique within a config; used in file names
  double c_alpha = 1.0;
  double c_eta = 1.0;
  int n_faces = 0;   // 0: number of faces of the action polytope
  double eta = 0.0;  // PF-OGD and SPO+; 0 selects the default
  SpoVariant variant = SpoVariant::Canonical;
  OracleConfig oracle;
};

struct ExperimentConfig {
  KnapsackEnvConfig env;
  std::vector<LearnerSpec> learners;
  int T = 2000;
  int n_runs = 5;
  std::uint64_t base_seed = 0;
  double kappa = 0.0;
  std::string output_dir = "out";
  bool emit_round_dump = false;
  double theta_radius = 10.0;
  double theta_init_scale = 0.0;  // 0: theta_1 = 0; else projected N(0, scale^2 I)
  int workers = 0;                // 0: OpenMP default

  void validate() const;
};

/// Parses the JSON config document. Throws ConfigError.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
std::string config_to_json(const ExperimentConfig& cfg);

LearnerKind learner_kind_from_string(const std::string& s);
std::string to_string(LearnerKind kind);

std::unique_ptr<Learner> make_learner(const LearnerSpec& spec, const Problem& problem,
                                      const Eigen::VectorXd& theta_init, int T);

struct LearnerRun {
  RunTrace trace;
  bool failed = false;
  std::string error;
  std::uint64_t stream_hash = 0;  // digest of the (X_t, c_t) sequence consumed
};

struct RunOutcome {
  std::vector<LearnerRun> learners;  // indexed like cfg.learners
  std::vector<LoggedRound> log;
  std::vector<RoundData> rounds;
};

/// Runs every learner of cfg on the environment stream of run `run_index`.
RunOutcome run_single(const ExperimentConfig& cfg, int run_index);

struct ExperimentResult {
  std::vector<RunOutcome> runs;
  double wall_seconds = 0.0;
  std::vector<std::string> files;  // written files, relative to output_dir
};

struct ExecOptions {
  bool parallel = true;
  bool write_outputs = true;
};

/// Seeds run concurrently when opts.parallel is set; the serial path is the
/// reference and produces identical results.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const ExecOptions& opts = {});

/// Final cumulative average cost per successful run for the named learner.
std::vector<double> final_costs(const ExperimentResult& res, std::size_t learner);
std::vector<double> final_mses(const ExperimentResult& res, std::size_t learner);

struct SweepRow {
  double gamma = 0.0;
  double mean_gap = 0.0;  // PF-OGD minus DF-OGD final cumulative average cost
  double ci_half_width = 0.0;
};

/// Runs the experiment for each gamma under output_dir/gamma_<i> and writes
/// output_dir/sweep_gamma.csv. Needs a PF-OGD and a DF-OGD learner.
std::vector<SweepRow> sweep_gamma(const ExperimentConfig& cfg,
                                  const std::vector<double>& gamma_grid,
                                  const ExecOptions& opts = {});

/// Hex SHA-256 of a file's contents.
std::string sha256_file(const std::string& path);

std::string version_string();

}  // namespace dfl
