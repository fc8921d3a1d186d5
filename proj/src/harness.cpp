#include "dfl/harness.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "dfl/csv.hpp"
#include "dfl/errors.hpp"
#include "json.hpp"

#ifndef DFL_VERSION
#define DFL_VERSION "unknown"
#endif

namespace dfl {

namespace fs = std::filesystem;
using nlohmann::json;

std::string version_string() { return DFL_VERSION; }

LearnerKind learner_kind_from_string(const std::string& s) {
  if (s == "df_ogd") return LearnerKind::DfOgd;
  if (s == "df_ftpl") return LearnerKind::DfFtpl;
  if (s == "pf_ogd") return LearnerKind::PfOgd;
  if (s == "spo_plus") return LearnerKind::SpoPlus;
  throw ConfigError("unknown learner kind '" + s + "'");
}

std::string to_string(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::DfOgd: return "df_ogd";
    case LearnerKind::DfFtpl: return "df_ftpl";
    case LearnerKind::PfOgd: return "pf_ogd";
    case LearnerKind::SpoPlus: return "spo_plus";
  }
  return "unknown";
}

void ExperimentConfig::validate() const {
  try {
    env.validate();
  } catch (const InvalidInput& e) {
    throw ConfigError(std::string("env: ") + e.what());
  }
  if (T < 1) throw ConfigError("T must be >= 1");
  if (n_runs < 1) throw ConfigError("n_runs must be >= 1");
  if (!(kappa >= 0.0)) throw ConfigError("kappa must be >= 0");
  if (!(theta_radius > 0.0)) throw ConfigError("theta_radius must be > 0");
  if (!(theta_init_scale >= 0.0)) throw ConfigError("theta_init_scale must be >= 0");
  if (workers < 0) throw ConfigError("workers must be >= 0");
  if (learners.empty()) throw ConfigError("at least one learner is required");
  std::set<std::string> names;
  for (const auto& l : learners) {
    if (l.name.empty()) throw ConfigError("learner name must not be empty");
    if (l.name.find_first_of("/\\ ") != std::string::npos) {
      throw ConfigError("learner name '" + l.name + "' is not a valid file stem");
    }
    if (!names.insert(l.name).second) throw ConfigError("duplicate learner name " + l.name);
    if (!(l.c_alpha > 0.0) || !(l.c_eta > 0.0)) {
      throw ConfigError(l.name + ": c_alpha and c_eta must be > 0");
    }
    if (l.n_faces < 0) throw ConfigError(l.name + ": n_faces must be >= 0");
    if (!(l.eta >= 0.0)) throw ConfigError(l.name + ": eta must be >= 0");
    try {
      l.oracle.validate();
    } catch (const InvalidInput& e) {
      throw ConfigError(l.name + ": " + e.what());
    }
  }
}

namespace {

template <class T>
void take(const json& j, const char* key, T& dst) {
  if (!j.contains(key)) return;
  try {
    dst = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("bad value for '") + key + "'");
  }
}

void reject_unknown(const json& j, std::initializer_list<const char*> keys,
                    const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : keys) ok = ok || it.key() == k;
    if (!ok) throw ConfigError("unknown key '" + it.key() + "' in " + where);
  }
}

LearnerSpec parse_learner(const json& j) {
  if (!j.is_object()) throw ConfigError("learner entry must be an object");
  reject_unknown(j, {"kind", "name", "c_alpha", "c_eta", "n_faces", "eta", "variant", "oracle"},
                 "learner");
  LearnerSpec s;
  std::string kind;
  take(j, "kind", kind);
  if (kind.empty()) throw ConfigError("learner kind is required");
  s.kind = learner_kind_from_string(kind);
  s.name = kind;
  take(j, "name", s.name);
  take(j, "c_alpha", s.c_alpha);
  take(j, "c_eta", s.c_eta);
  take(j, "n_faces", s.n_faces);
  take(j, "eta", s.eta);
  std::string variant = "canonical";
  take(j, "variant", variant);
  if (variant == "canonical") {
    s.variant = SpoVariant::Canonical;
  } else if (variant == "literal") {
    s.variant = SpoVariant::Literal;
  } else {
    throw ConfigError("unknown SPO+ variant '" + variant + "'");
  }
  if (j.contains("oracle")) {
    const json& o = j.at("oracle");
    if (!o.is_object()) throw ConfigError("oracle must be an object");
    reject_unknown(o, {"steps", "lr", "batch", "restarts"}, "oracle");
    take(o, "steps", s.oracle.steps);
    take(o, "lr", s.oracle.lr);
    take(o, "batch", s.oracle.batch);
    take(o, "restarts", s.oracle.restarts);
  }
  return s;
}

json learner_to_json(const LearnerSpec& s) {
  json j{{"kind", to_string(s.kind)},
         {"name", s.name},
         {"c_alpha", s.c_alpha},
         {"c_eta", s.c_eta},
         {"n_faces", s.n_faces},
         {"eta", s.eta},
         {"variant", s.variant == SpoVariant::Canonical ? "canonical" : "literal"},
         {"oracle",
          {{"steps", s.oracle.steps},
           {"lr", s.oracle.lr},
           {"batch", s.oracle.batch},
           {"restarts", s.oracle.restarts}}}};
  return j;
}

json config_json(const ExperimentConfig& c) {
  json learners = json::array();
  for (const auto& l : c.learners) learners.push_back(learner_to_json(l));
  return json{{"T", c.T},
              {"n_runs", c.n_runs},
              {"base_seed", c.base_seed},
              {"kappa", c.kappa},
              {"output_dir", c.output_dir},
              {"emit_round_dump", c.emit_round_dump},
              {"theta_radius", c.theta_radius},
              {"theta_init_scale", c.theta_init_scale},
              {"workers", c.workers},
              {"env",
               {{"K", c.env.K},
                {"p", c.env.p},
                {"rho", c.env.rho},
                {"amplitude", c.env.amplitude},
                {"gamma", c.env.gamma},
                {"noise_std", c.env.noise_std},
                {"clip", c.env.clip},
                {"stationary", c.env.stationary}}},
              {"learners", learners}};
}

std::uint64_t fnv1a(std::uint64_t h, const double* data, std::size_t n) {
  const auto* bytes = reinterpret_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n * sizeof(double); ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(j,
                 {"T", "n_runs", "base_seed", "kappa", "output_dir", "emit_round_dump",
                  "theta_radius", "theta_init_scale", "workers", "env", "learners"},
                 "config");
  ExperimentConfig c;
  take(j, "T", c.T);
  take(j, "n_runs", c.n_runs);
  take(j, "base_seed", c.base_seed);
  take(j, "kappa", c.kappa);
  take(j, "output_dir", c.output_dir);
  take(j, "emit_round_dump", c.emit_round_dump);
  take(j, "theta_radius", c.theta_radius);
  take(j, "theta_init_scale", c.theta_init_scale);
  take(j, "workers", c.workers);
  if (j.contains("env")) {
    const json& e = j.at("env");
    if (!e.is_object()) throw ConfigError("env must be an object");
    reject_unknown(e, {"K", "p", "rho", "amplitude", "gamma", "noise_std", "clip", "stationary"},
                   "env");
    take(e, "K", c.env.K);
    take(e, "p", c.env.p);
    take(e, "rho", c.env.rho);
    take(e, "amplitude", c.env.amplitude);
    take(e, "gamma", c.env.gamma);
    take(e, "noise_std", c.env.noise_std);
    take(e, "clip", c.env.clip);
    take(e, "stationary", c.env.stationary);
  }
  if (j.contains("learners")) {
    const json& ls = j.at("learners");
    if (!ls.is_array()) throw ConfigError("learners must be an array");
    for (const auto& l : ls) c.learners.push_back(parse_learner(l));
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const ExperimentConfig& cfg) { return config_json(cfg).dump(2); }

std::unique_ptr<Learner> make_learner(const LearnerSpec& spec, const Problem& problem,
                                      const Eigen::VectorXd& theta_init, int T) {
  const int n = spec.n_faces > 0 ? spec.n_faces : problem.poly->faces();
  const int m = problem.domain.dim();
  switch (spec.kind) {
    case LearnerKind::DfOgd:
      return std::make_unique<DfOgd>(problem, theta_init,
                                     Schedule::dynamic(n, spec.c_alpha, spec.c_eta),
                                     Regularizer::negative_entropy(), spec.oracle);
    case LearnerKind::DfFtpl:
      return std::make_unique<DfFtpl>(
          problem, theta_init, Schedule::static_from_horizon(m, n, T, spec.c_alpha, spec.c_eta),
          Regularizer::negative_entropy(), spec.oracle);
    case LearnerKind::PfOgd:
      return std::make_unique<PfOgd>(problem, theta_init, spec.eta > 0.0 ? spec.eta : 10.0);
    case LearnerKind::SpoPlus:
      return std::make_unique<SpoPlus>(problem, theta_init, spec.eta > 0.0 ? spec.eta : 1.0,
                                       spec.variant);
  }
  throw InternalInvariant("unhandled learner kind");
}

RunOutcome run_single(const ExperimentConfig& cfg, int run_index) {
  const auto idx = static_cast<std::uint64_t>(run_index);
  KnapsackEnv env(cfg.env, cfg.base_seed, idx);
  RunOutcome out;
  out.rounds = env.generate(cfg.T);
  out.log.reserve(out.rounds.size());
  for (const auto& r : out.rounds) out.log.push_back({r.X, r.true_cost});

  Problem problem{std::make_shared<const Polytope>(make_simplex(cfg.env.K)),
                  std::make_shared<const LinearModel>(cfg.env.p, cfg.env.K),
                  ParamDomain::ball(cfg.theta_radius, cfg.env.p), cfg.kappa};

  Eigen::VectorXd theta_init = Eigen::VectorXd::Zero(cfg.env.p);
  if (cfg.theta_init_scale > 0.0) {
    Rng r = make_stream(cfg.base_seed, idx, "theta_init");
    std::normal_distribution<double> n01;
    for (int j = 0; j < cfg.env.p; ++j) theta_init(j) = cfg.theta_init_scale * n01(r);
  }

  out.learners.resize(cfg.learners.size());
  for (std::size_t li = 0; li < cfg.learners.size(); ++li) {
    const LearnerSpec& spec = cfg.learners[li];
    LearnerRun& lr = out.learners[li];
    lr.stream_hash = kFnvOffset;
    try {
      auto learner = make_learner(spec, problem, theta_init, cfg.T);
      Rng rng = make_stream(cfg.base_seed, idx, "learner:" + spec.name);
      lr.trace.rounds.reserve(cfg.T);
      for (int t = 0; t < cfg.T; ++t) {
        const RoundData& rd = out.rounds[t];
        lr.stream_hash = fnv1a(lr.stream_hash, rd.X.data(), rd.X.size());
        lr.stream_hash = fnv1a(lr.stream_hash, rd.true_cost.data(), rd.true_cost.size());
        RoundRecord rec;
        rec.t = t + 1;
        rec.theta_norm = learner->state().theta.norm();
        const Action a = learner->act(rd.X);
        rec.incurred_cost = rd.true_cost.dot(a.w);
        rec.mse = (rd.true_cost - a.predicted_cost).squaredNorm();
        learner->update(rd.X, rd.true_cost, rng);
        rec.alpha_t = learner->state().alpha;
        rec.eta_t = learner->state().eta;
        rec.path_length = learner->state().path_length;
        lr.trace.rounds.push_back(rec);
      }
    } catch (const std::exception& e) {
      lr.failed = true;
      lr.error = e.what();
    }
  }

  for (std::size_t li = 1; li < out.learners.size(); ++li) {
    const auto& a = out.learners[0];
    const auto& b = out.learners[li];
    if (!a.failed && !b.failed && a.stream_hash != b.stream_hash) {
      throw InternalInvariant("learners consumed different environment streams");
    }
  }
  return out;
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(ctx);
    throw InternalInvariant("SHA-256 unavailable");
  }
  char buf[1 << 15];
  while (in) {
    in.read(buf, sizeof buf);
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::string hex;
  char h[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(h, sizeof h, "%02x", md[i]);
    hex += h;
  }
  return hex;
}

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path.string());
  return f;
}

void write_trace(const fs::path& path, const RunTrace& trace) {
  std::ofstream f = open_out(path);
  CsvWriter w(f);
  w.header({"t", "incurred_cost", "cum_avg_cost", "mse", "alpha_t", "eta_t", "path_length"});
  double s = 0.0;
  for (std::size_t i = 0; i < trace.rounds.size(); ++i) {
    const RoundRecord& r = trace.rounds[i];
    s += r.incurred_cost;
    w.row(static_cast<long long>(r.t), {r.incurred_cost, s / static_cast<double>(i + 1), r.mse,
                                        r.alpha_t, r.eta_t, r.path_length});
  }
  if (!f) throw IoError("write failed for " + path.string());
}

void write_aggregate(const fs::path& path, const std::vector<std::vector<double>>& series,
                     int T) {
  std::vector<double> mean, hw;
  if (series.empty()) {
    mean.assign(T, std::numeric_limits<double>::quiet_NaN());
    hw = mean;
  } else {
    try {
      AggregateStats st = aggregate(series);
      mean = std::move(st.mean);
      hw = std::move(st.ci_half_width);
    } catch (const CiUndefined& e) {
      mean = e.mean();
      hw.assign(mean.size(), std::numeric_limits<double>::quiet_NaN());
    }
  }
  std::ofstream f = open_out(path);
  CsvWriter w(f);
  w.header({"t", "mean", "ci_half_width"});
  for (std::size_t t = 0; t < mean.size(); ++t) {
    w.row(static_cast<long long>(t + 1), {mean[t], hw[t]});
  }
  if (!f) throw IoError("write failed for " + path.string());
}

void write_outputs(const ExperimentConfig& cfg, ExperimentResult& res) {
  const fs::path root(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(root / "traces", ec);
  fs::create_directories(root / "aggregate", ec);
  if (cfg.emit_round_dump) fs::create_directories(root / "rounds", ec);
  if (ec) throw IoError("cannot create output directory " + root.string());

  auto add = [&](const fs::path& rel) { res.files.push_back(rel.generic_string()); };

  for (std::size_t li = 0; li < cfg.learners.size(); ++li) {
    const std::string& name = cfg.learners[li].name;
    std::vector<std::vector<double>> cost, mse;
    for (std::size_t r = 0; r < res.runs.size(); ++r) {
      const LearnerRun& lr = res.runs[r].learners[li];
      const fs::path rel = fs::path("traces") / (name + "_run" + std::to_string(r) + ".csv");
      write_trace(root / rel, lr.trace);
      add(rel);
      if (!lr.failed) {
        cost.push_back(cum_avg_cost(lr.trace));
        mse.push_back(cum_avg_mse(lr.trace));
      }
    }
    const fs::path rc = fs::path("aggregate") / (name + "_cost.csv");
    const fs::path rm = fs::path("aggregate") / (name + "_mse.csv");
    write_aggregate(root / rc, cost, cfg.T);
    write_aggregate(root / rm, mse, cfg.T);
    add(rc);
    add(rm);
  }
  if (cfg.emit_round_dump) {
    for (std::size_t r = 0; r < res.runs.size(); ++r) {
      const fs::path rel = fs::path("rounds") / ("run" + std::to_string(r) + ".csv");
      std::ofstream f = open_out(root / rel);
      write_round_dump(f, res.runs[r].rounds);
      add(rel);
    }
  }

  const Polytope simplex = make_simplex(cfg.env.K);
  json runs = json::array();
  for (std::size_t r = 0; r < res.runs.size(); ++r) {
    json lj = json::array();
    bool any_failed = false;
    for (std::size_t li = 0; li < cfg.learners.size(); ++li) {
      const LearnerRun& lr = res.runs[r].learners[li];
      char hash[17];
      std::snprintf(hash, sizeof hash, "%016llx",
                    static_cast<unsigned long long>(lr.stream_hash));
      json e{{"learner", cfg.learners[li].name}, {"failed", lr.failed}, {"stream_hash", hash}};
      if (lr.failed) {
        e["error"] = lr.error;
        any_failed = true;
      } else {
        e["best_vertex_regret"] =
            static_regret_proxy(lr.trace, res.runs[r].log, simplex, Comparator::best_vertex());
      }
      lj.push_back(e);
    }
    runs.push_back({{"run", r}, {"failed", any_failed}, {"learners", lj}});
  }
  json files = json::array();
  for (const auto& f : res.files) {
    files.push_back({{"path", f}, {"sha256", sha256_file((root / f).string())}});
  }
  json manifest{{"version", version_string()},
                {"config", config_json(cfg)},
                {"wall_time_seconds", res.wall_seconds},
                {"metrics",
                 {{"incurred_cost", "realized cost of the played vertex"},
                  {"mse", "squared error of the prediction used to act"},
                  {"best_vertex_regret",
                   "total incurred cost minus the best fixed vertex in hindsight; "
                   "a proxy for static regret, not the expected-loss quantity"}}},
                {"runs", runs},
                {"files", files}};
  std::ofstream f = open_out(root / "manifest.json");
  f << manifest.dump(2) << '\n';
  if (!f) throw IoError("write failed for manifest");
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, const ExecOptions& opts) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  ExperimentResult res;
  res.runs.resize(cfg.n_runs);
  if (opts.parallel) {
    std::vector<std::string> errors(cfg.n_runs);
    const int workers = cfg.workers > 0 ? cfg.workers : 0;
    if (workers > 0) {
#pragma omp parallel for schedule(dynamic) num_threads(workers)
      for (int r = 0; r < cfg.n_runs; ++r) {
        try {
          res.runs[r] = run_single(cfg, r);
        } catch (const std::exception& e) {
          errors[r] = e.what();
        }
      }
    } else {
#pragma omp parallel for schedule(dynamic)
      for (int r = 0; r < cfg.n_runs; ++r) {
        try {
          res.runs[r] = run_single(cfg, r);
        } catch (const std::exception& e) {
          errors[r] = e.what();
        }
      }
    }
    for (const auto& e : errors) {
      if (!e.empty()) throw InternalInvariant(e);
    }
  } else {
    for (int r = 0; r < cfg.n_runs; ++r) res.runs[r] = run_single(cfg, r);
  }
  res.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (opts.write_outputs) write_outputs(cfg, res);
  return res;
}

namespace {

std::vector<double> final_values(const ExperimentResult& res, std::size_t learner,
                                 std::vector<double> (*series)(const RunTrace&)) {
  std::vector<double> out;
  for (const auto& run : res.runs) {
    const LearnerRun& lr = run.learners.at(learner);
    if (!lr.failed) out.push_back(series(lr.trace).back());
  }
  return out;
}

}  // namespace

std::vector<double> final_costs(const ExperimentResult& res, std::size_t learner) {
  return final_values(res, learner, &cum_avg_cost);
}

std::vector<double> final_mses(const ExperimentResult& res, std::size_t learner) {
  return final_values(res, learner, &cum_avg_mse);
}

std::vector<SweepRow> sweep_gamma(const ExperimentConfig& cfg,
                                  const std::vector<double>& gamma_grid,
                                  const ExecOptions& opts) {
  cfg.validate();
  std::size_t pf = cfg.learners.size(), df = cfg.learners.size();
  for (std::size_t i = 0; i < cfg.learners.size(); ++i) {
    if (cfg.learners[i].kind == LearnerKind::PfOgd && pf == cfg.learners.size()) pf = i;
    if (cfg.learners[i].kind == LearnerKind::DfOgd && df == cfg.learners.size()) df = i;
  }
  if (pf == cfg.learners.size() || df == cfg.learners.size()) {
    throw ConfigError("sweep-gamma needs a pf_ogd and a df_ogd learner");
  }
  for (double g : gamma_grid) {
    if (!(g >= 0.0 && g <= 1.0)) throw ConfigError("gamma values must lie in [0, 1]");
  }

  std::vector<SweepRow> rows;
  for (std::size_t gi = 0; gi < gamma_grid.size(); ++gi) {
    ExperimentConfig c = cfg;
    c.env.gamma = gamma_grid[gi];
    c.output_dir = (fs::path(cfg.output_dir) / ("gamma_" + std::to_string(gi))).string();
    const ExperimentResult res = run_experiment(c, opts);
    std::vector<std::vector<double>> gaps;
    for (const auto& run : res.runs) {
      const LearnerRun& a = run.learners[pf];
      const LearnerRun& b = run.learners[df];
      if (a.failed || b.failed) continue;
      gaps.push_back({cum_avg_cost(a.trace).back() - cum_avg_cost(b.trace).back()});
    }
    SweepRow row{gamma_grid[gi], std::numeric_limits<double>::quiet_NaN(),
                 std::numeric_limits<double>::quiet_NaN()};
    if (!gaps.empty()) {
      try {
        const AggregateStats st = aggregate(gaps);
        row.mean_gap = st.mean[0];
        row.ci_half_width = st.ci_half_width[0];
      } catch (const CiUndefined& e) {
        row.mean_gap = e.mean()[0];
      }
    }
    rows.push_back(row);
  }

  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  std::ofstream f = open_out(fs::path(cfg.output_dir) / "sweep_gamma.csv");
  CsvWriter w(f);
  w.header({"gamma", "mean_gap", "ci_half_width"});
  for (const auto& r : rows) w.row(r.gamma, {r.mean_gap, r.ci_half_width});
  if (!f) throw IoError("write failed for sweep summary");
  return rows;
}

}  // namespace dfl
