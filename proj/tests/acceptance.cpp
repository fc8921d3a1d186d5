// One PASS/FAIL line per acceptance criterion. Exit status 1 if any fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dfl/geometry.hpp"
#include "dfl/harness.hpp"
#include "dfl/learners.hpp"
#include "dfl/metrics.hpp"
#include "dfl/oracle.hpp"
#include "dfl/regmin.hpp"
#include "support.hpp"

using namespace dfl;
using testing_support::fd_gradient;
using testing_support::randn;
using testing_support::randv;
namespace fs = std::filesystem;

namespace {

// Tolerances.
constexpr double kFdTolEntropic = 1e-4;
constexpr double kFdTolBarrier = 1e-3;
constexpr double kFdStep = 1e-5;
// Gradient norms below this are at the round-off level of central differences.
constexpr double kFdNoiseFloor = 1e-6;
constexpr double kJacobianSeconds = 10.0;
constexpr double kGapSlack = 1e-9;
constexpr double kNewtonResidual = 1e-8;
constexpr double kNewtonGridTol = 1e-3;
constexpr double kMarginSeconds = 30.0;
constexpr double kMarginSe = 3.0;
constexpr double kOracleValue = 1e-4;
constexpr double kLawSe = 3.0;

int failures = 0;

void report(const std::string& name, bool ok, const std::string& detail) {
  std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Box [-1,1]^d cut by d+1 random halfspaces keeping the origin strictly inside.
Polytope random_general(int d, Rng& rng) {
  const int extra = d + 1;
  Eigen::MatrixXd A(d, 2 * d + extra);
  Eigen::VectorXd b(2 * d + extra);
  A.leftCols(d).setIdentity();
  A.middleCols(d, d) = -Eigen::MatrixXd::Identity(d, d);
  b.head(2 * d).setOnes();
  std::uniform_real_distribution<double> u(0.3, 1.2);
  for (int k = 0; k < extra; ++k) {
    A.col(2 * d + k) = randv(d, rng);
    b(2 * d + k) = u(rng) * A.col(2 * d + k).norm();
  }
  return Polytope::from_halfspaces(A, b, Eigen::VectorXd::Zero(d));
}

Polytope random_box(int d, Rng& rng) {
  std::uniform_real_distribution<double> u(0.2, 2.0);
  Eigen::VectorXd lo(d), hi(d);
  for (int i = 0; i < d; ++i) {
    lo(i) = -u(rng);
    hi(i) = u(rng);
  }
  return make_box(lo, hi);
}

double barrier_objective(const Polytope& p, const Eigen::VectorXd& c, double alpha,
                         const Eigen::VectorXd& w) {
  double v = c.dot(w);
  for (int i = 0; i < p.faces(); ++i) {
    const double s = p.b()(i) - p.A().col(i).dot(w);
    if (!(s > 0)) return std::numeric_limits<double>::infinity();
    v -= alpha * std::log(s);
  }
  return v;
}

// Grid scans at steps 1e-2, 1e-3 and 1e-4, each centered on the previous best point.
Eigen::VectorXd grid_barrier_minimizer(const Polytope& p, const Eigen::VectorXd& c, double alpha) {
  const int d = p.dim();
  auto scan = [&](const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, double step) {
    std::vector<long> n(d);
    long total = 1;
    for (int i = 0; i < d; ++i) {
      n[i] = static_cast<long>(std::floor((hi(i) - lo(i)) / step)) + 1;
      total *= n[i];
    }
    Eigen::VectorXd best_w = p.interior_point(), w(d);
    double best = std::numeric_limits<double>::infinity();
    for (long k = 0; k < total; ++k) {
      long r = k;
      for (int i = 0; i < d; ++i) {
        w(i) = lo(i) + step * static_cast<double>(r % n[i]);
        r /= n[i];
      }
      const double v = barrier_objective(p, c, alpha, w);
      if (v < best) {
        best = v;
        best_w = w;
      }
    }
    return best_w;
  };
  Eigen::VectorXd w = scan(p.box_lower(), p.box_upper(), 1e-2);
  w = scan(w - Eigen::VectorXd::Constant(d, 5e-2), w + Eigen::VectorXd::Constant(d, 5e-2), 1e-3);
  return scan(w - Eigen::VectorXd::Constant(d, 5e-3), w + Eigen::VectorXd::Constant(d, 5e-3), 1e-4);
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(DFL_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double mean_of(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double fd_rel_err(const Eigen::VectorXd& analytic, const Eigen::VectorXd& fd, int& floored) {
  const double scale = std::max(analytic.norm(), fd.norm());
  if (scale < kFdNoiseFloor) ++floored;
  return (analytic - fd).norm() / std::max(scale, kFdNoiseFloor);
}

void jacobian_correctness() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(101);
  const double alphas[] = {0.05, 0.5, 2.0};
  double worst_ent = 0, worst_bar = 0;
  int floored = 0;
  for (int k = 0; k < 200; ++k) {
    const int d = 2 + k % 5;
    const int m = 1 + (k / 5) % 4;
    const double alpha = alphas[k % 3];
    const LinearModel model(m, d);
    const Polytope p = make_simplex(d);
    const Eigen::MatrixXd X = randn(d, m, rng);
    const Eigen::VectorXd g = randv(d, rng);
    const Eigen::VectorXd th = randv(m, rng);
    const auto reg = Regularizer::negative_entropy();
    auto f = [&](const Eigen::VectorXd& t) { return surrogate_loss(t, X, g, alpha, model, p, reg); };
    worst_ent = std::max(worst_ent, fd_rel_err(surrogate_gradient(th, X, g, alpha, model, p, reg),
                                               fd_gradient(f, th, kFdStep), floored));
  }
  for (int k = 0; k < 200; ++k) {
    const int d = 1 + k % 4;
    const int m = 1 + (k / 4) % 4;
    const double alpha = alphas[k % 3];
    const LinearModel model(m, d);
    const Polytope p = (k / 16) % 2 ? random_general(d, rng) : random_box(d, rng);
    const Eigen::MatrixXd X = randn(d, m, rng);
    const Eigen::VectorXd g = randv(d, rng);
    const Eigen::VectorXd th = randv(m, rng);
    const auto reg = Regularizer::log_barrier();
    auto f = [&](const Eigen::VectorXd& t) { return surrogate_loss(t, X, g, alpha, model, p, reg); };
    worst_bar = std::max(worst_bar, fd_rel_err(surrogate_gradient(th, X, g, alpha, model, p, reg),
                                               fd_gradient(f, th, kFdStep), floored));
  }
  const double secs = seconds_since(t0);
  std::ostringstream d;
  d << "max rel err entropic " << worst_ent << " (tol " << kFdTolEntropic << "), log-barrier "
    << worst_bar << " (tol " << kFdTolBarrier << "), " << floored << " of 400 gradients below the "
    << kFdNoiseFloor << " noise floor, " << secs << " s (limit " << kJacobianSeconds << ")";
  report("jacobian_correctness", worst_ent <= kFdTolEntropic && worst_bar <= kFdTolBarrier &&
                                     secs < kJacobianSeconds,
         d.str());
}

void regularization_gap_bounds() {
  Rng rng(202);
  const double alphas[] = {0.01, 0.1, 1.0};
  double worst_simplex = -1e300, worst_poly = -1e300;
  for (int k = 0; k < 1000; ++k) {
    const double alpha = alphas[k % 3];
    const int d = 2 + k % 5;
    const Eigen::VectorXd g = 2.0 * randv(d, rng);
    const Polytope s = make_simplex(d);
    const double ws = g.dot(lp_argmin(g, s).point);
    const double gap_s = g.dot(entropic_argmin(g, alpha).w_tilde) - ws;
    worst_simplex = std::max(worst_simplex, gap_s - (alpha * std::log(d) + kGapSlack));

    const int dp = 1 + k % 4;
    const Polytope p = k % 2 ? random_general(dp, rng) : random_box(dp, rng);
    const Eigen::VectorXd gp = 2.0 * randv(dp, rng);
    const double wp = gp.dot(lp_argmin(gp, p).point);
    const double gap_p = gp.dot(logbarrier_argmin(gp, p, alpha).w_tilde) - wp;
    worst_poly = std::max(worst_poly, gap_p - (p.faces() * alpha + kGapSlack));
  }
  std::ostringstream d;
  d << "max (gap - bound): simplex " << worst_simplex << ", halfspace " << worst_poly;
  report("regularization_gap_bounds", worst_simplex <= 0 && worst_poly <= 0, d.str());
}

void margin_to_distance() {
  Rng rng(303);
  double worst = -1e300;
  int cases = 0;
  for (double eps : {0.1, 0.5, 1.0}) {
    for (double alpha : {0.01, 0.1}) {
      for (int rep = 0; rep < 20; ++rep) {
        const int d = 2 + rep % 5;
        // Winner at a random base, runner-up exactly eps above, the rest further up.
        std::uniform_real_distribution<double> u(0.0, 2.0);
        const double base = u(rng) - 1.0;
        Eigen::VectorXd g(d);
        for (int i = 0; i < d; ++i) g(i) = base + eps + 0.01 + u(rng);
        std::uniform_int_distribution<int> pick(0, d - 1);
        const int win = pick(rng);
        int second = pick(rng);
        while (second == win) second = pick(rng);
        g(win) = base;
        g(second) = base + eps;
        const Eigen::VectorXd ws = lp_argmin(g, make_simplex(d)).point;
        const Eigen::VectorXd wt = entropic_argmin(g, alpha).w_tilde;
        worst = std::max(worst, (ws - wt).lpNorm<1>() - 2 * alpha * std::log(d) / eps);
        ++cases;
      }
    }
  }
  report("margin_to_distance", worst <= 0,
         std::to_string(cases) + " cases, max (l1 dist - bound) " + fmt("%.3e", worst));
}

void newton_solver() {
  Rng rng(404);
  const double alphas[] = {0.01, 0.1, 1.0};
  double worst_res = 0, min_slack = 1e300, worst_grid = 0;
  int grid_checked = 0;
  for (int k = 0; k < 500; ++k) {
    const int d = 1 + k % 4;
    Polytope p = k % 3 == 0 ? random_box(d, rng) : random_general(d, rng);
    if (k % 3 == 2 && d >= 2) p = make_simplex(d);
    const double alpha = alphas[(k / 4) % 3];
    const Eigen::VectorXd c = 2.0 * randv(d, rng);
    const auto s = logbarrier_argmin(c, p, alpha);
    worst_res = std::max(worst_res, s.residual);
    for (int i = 0; i < p.faces(); ++i) {
      if (!p.equality_rows()[i]) min_slack = std::min(min_slack, s.active_gaps(i));
    }
    if (d <= 2 && p.kind() != PolytopeKind::Simplex) {
      const Eigen::VectorXd g = grid_barrier_minimizer(p, c, alpha);
      worst_grid = std::max(worst_grid, (g - s.w_tilde).lpNorm<Eigen::Infinity>());
      ++grid_checked;
    }
  }
  std::ostringstream d;
  d << "max residual " << worst_res << " (tol " << kNewtonResidual << "), min slack " << min_slack
    << ", grid linf " << worst_grid << " over " << grid_checked << " instances (tol " << kNewtonGridTol << ")";
  report("newton_solver", worst_res <= kNewtonResidual && min_slack > 0 && worst_grid <= kNewtonGridTol,
         d.str());
}

void margin_bound() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto rows = margin_constant_check(3, 2, 100000, log_grid(1e-3, 1e-1, 20), 505);
  const double secs = seconds_since(t0);
  bool ok = rows.size() == 20 && secs < kMarginSeconds;
  double worst = -1e300;
  for (const auto& r : rows) {
    const double excess = r.empirical - (r.bound + kMarginSe * r.std_error);
    worst = std::max(worst, excess);
    ok = ok && excess <= 0;
  }
  std::ostringstream d;
  d << "20-point grid, max (empirical - bound - 3 SE) " << worst << ", " << secs << " s (limit "
    << kMarginSeconds << ")";
  report("margin_bound", ok, d.str());
}

void oracle_sanity() {
  Rng rng(606);
  const ParamDomain dom = ParamDomain::ball(10.0, 5);
  double worst = 0;
  for (int k = 0; k < 10; ++k) {
    const Eigen::VectorXd target = dom.sample_uniform(rng);
    const FunctionObjective obj(
        [target](const Eigen::VectorXd& t) { return (t - target).squaredNorm(); },
        [target](const Eigen::VectorXd& t) { return Eigen::VectorXd(2.0 * (t - target)); });
    const Eigen::VectorXd start = dom.sample_uniform(rng);
    const auto r = approx_minimize(obj, start, dom, {200, 0.1, 32, 0}, rng);
    worst = std::max(worst, r.value);
  }
  report("oracle_sanity", worst <= kOracleValue,
         "worst final value over 10 starts " + fmt("%.3e", worst) + " (tol 1e-4)");
}

void benchmark_ordering() {
  ExperimentConfig cfg = load_config(std::string(DFL_SOURCE_DIR) + "/configs/benchmark.json");
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentResult res = run_experiment(cfg, {true, false});
  const double secs = seconds_since(t0);
  auto idx = [&](LearnerKind k) {
    for (std::size_t i = 0; i < cfg.learners.size(); ++i)
      if (cfg.learners[i].kind == k) return i;
    return cfg.learners.size();
  };
  const std::size_t df = idx(LearnerKind::DfOgd), ft = idx(LearnerKind::DfFtpl),
                    pf = idx(LearnerKind::PfOgd), spo = idx(LearnerKind::SpoPlus);
  const double c_df = mean_of(final_costs(res, df)), c_ft = mean_of(final_costs(res, ft));
  const double c_pf = mean_of(final_costs(res, pf)), c_spo = mean_of(final_costs(res, spo));
  const double m_df = mean_of(final_mses(res, df)), m_pf = mean_of(final_mses(res, pf));
  const bool a = c_df < c_pf, b = c_df < c_spo, c = c_ft < c_pf, e = m_df >= m_pf;
  std::ostringstream d;
  d.precision(6);
  d << "cost df_ogd " << c_df << " df_ftpl " << c_ft << " pf_ogd " << c_pf << " spo_plus " << c_spo
    << "; mse df_ogd " << m_df << " pf_ogd " << m_pf << "; clauses df<pf " << a << " df<spo " << b
    << " ftpl<pf " << c << " mse_df>=mse_pf " << e << "; " << secs << " s";
  report("benchmark_ordering", a && b && c && e, d.str());
}

void sublinearity() {
  ExperimentConfig cfg = parse_config(R"({
    "T": 2000, "n_runs": 5, "base_seed": 77,
    "env": {"stationary": true},
    "learners": [{"kind": "df_ogd"}]})");
  const ExperimentResult res = run_experiment(cfg, {true, false});
  const Polytope simplex = make_simplex(cfg.env.K);
  std::vector<double> early, late;
  for (const auto& run : res.runs) {
    const auto& tr = run.learners[0].trace;
    early.push_back(static_regret_proxy(tr, run.log, simplex, Comparator::best_vertex(), nullptr, nullptr, 250) / 250.0);
    late.push_back(static_regret_proxy(tr, run.log, simplex, Comparator::best_vertex(), nullptr, nullptr, 2000) / 2000.0);
  }
  const double e = mean_of(early), l = mean_of(late);
  report("sublinearity", l < e,
         "mean proxy/t at t=250 " + fmt("%.6g", e) + ", at t=2000 " + fmt("%.6g", l));
}

void ftpl_perturbation_law() {
  Rng rng(909);
  bool ok = true;
  std::ostringstream d;
  for (double eta : {0.5, 2.0}) {
    const int n = 100000;
    const Eigen::VectorXd s = DfFtpl::draw_perturbation(n, eta, rng);
    const double mean = s.mean();
    const double sd = std::sqrt((s.array() - mean).square().sum() / (n - 1));
    const double z = (mean - 1.0 / eta) / (sd / std::sqrt(double(n)));
    ok = ok && std::abs(z) <= kLawSe;
    d << "eta " << eta << ": mean " << mean << " vs " << 1.0 / eta << " (z " << z << ") ";
  }
  report("ftpl_perturbation_law", ok, d.str());
}

void determinism() {
  const std::string cfg = std::string(DFL_SOURCE_DIR) + "/configs/benchmark.json";
  fs::remove_all("acc_det_a");
  fs::remove_all("acc_det_b");
  const int ra = run_cli("run --config " + cfg + " --out acc_det_a");
  const int rb = run_cli("run --config " + cfg + " --out acc_det_b");
  int compared = 0, differing = 0;
  if (ra == 0 && rb == 0) {
    for (const auto& entry : fs::recursive_directory_iterator("acc_det_a")) {
      if (entry.path().extension() != ".csv") continue;
      const fs::path rel = fs::relative(entry.path(), "acc_det_a");
      ++compared;
      if (slurp(entry.path()) != slurp(fs::path("acc_det_b") / rel)) ++differing;
    }
  }
  report("determinism", ra == 0 && rb == 0 && compared > 0 && differing == 0,
         "exit codes " + std::to_string(ra) + "/" + std::to_string(rb) + ", " +
             std::to_string(compared) + " CSV files compared, " + std::to_string(differing) + " differ");
}

void guarded(const char* name, const std::function<void()>& f) {
  try {
    f();
  } catch (const std::exception& e) {
    report(name, false, std::string("exception: ") + e.what());
  }
}

}  // namespace

int main() {
  guarded("jacobian_correctness", jacobian_correctness);
  guarded("regularization_gap_bounds", regularization_gap_bounds);
  guarded("margin_to_distance", margin_to_distance);
  guarded("newton_solver", newton_solver);
  guarded("margin_bound", margin_bound);
  guarded("oracle_sanity", oracle_sanity);
  guarded("benchmark_ordering", benchmark_ordering);
  guarded("sublinearity", sublinearity);
  guarded("ftpl_perturbation_law", ftpl_perturbation_law);
  guarded("determinism", determinism);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
