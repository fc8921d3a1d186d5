#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dfl/geometry.hpp"
#include "dfl/model.hpp"
#include "dfl/oracle.hpp"
#include "dfl/regmin.hpp"
#include "dfl/rng.hpp"

namespace dfl {

/// Regularization weight alpha_t and step size eta_t.
struct StepSizes {
  double alpha = 0.0;
  double eta = 0.0;
};

struct Schedule {
  enum class Mode { Static, Dynamic };

  Mode mode = Mode::Dynamic;
  double c_alpha = 1.0;
  double c_eta = 1.0;
  int n_faces = 1;
  StepSizes fixed;  // Static only

  /// alpha_t = c_alpha n^-1/2 t^-1/4 (1+P)^1/4,
  /// eta_t = min(eta_prev, c_eta n^-1/2 t^-3/4 (1+P)^3/4).
  static Schedule dynamic(int n_faces, double c_alpha = 1.0, double c_eta = 1.0);
  /// eta = c_eta m^1/4 T^-3/4 n^-1/2, alpha = c_alpha m^3/4 n^1/2 T^-1/4.
  static Schedule static_from_horizon(int m, int n_faces, int T,
                                      double c_alpha = 1.0, double c_eta = 1.0);
  static Schedule constant(double alpha, double eta);
};

StepSizes schedule_step(const Schedule& sched, int t, double path_length,
                        double eta_prev);

struct LearnerState {
  Eigen::VectorXd theta;
  int round = 0;  // completed updates
  Eigen::VectorXd oracle_warm;
  double path_length = 0.0;
  double eta_prev = 0.0;
  double alpha = 0.0;  // last alpha_t used
  double eta = 0.0;    // last eta_t used
};

struct Action {
  Eigen::VectorXd w;
  Eigen::VectorXd predicted_cost;
  std::optional<int> vertex_index;
};

/// Shared decision problem seen by every learner.
struct Problem {
  std::shared_ptr<const Polytope> poly;
  std::shared_ptr<const CostModel> model;
  ParamDomain domain;
  double kappa = 0.0;
};

class Learner {
 public:
  Learner(Problem problem, Eigen::VectorXd theta_init);
  virtual ~Learner() = default;

  /// Plays lp_argmin of g(theta_t, X) over the polytope.
  Action act(const Eigen::MatrixXd& X) const;
  virtual void update(const Eigen::MatrixXd& X, const Eigen::VectorXd& realized_cost,
                      Rng& rng) = 0;
  virtual std::string name() const = 0;

  const LearnerState& state() const noexcept { return state_; }
  const Problem& problem() const noexcept { return problem_; }

 protected:
  void check_round_input(const Eigen::MatrixXd& X,
                         const Eigen::VectorXd& realized_cost) const;

  Problem problem_;
  LearnerState state_;
};

class DfOgd final : public Learner {
 public:
  DfOgd(Problem problem, Eigen::VectorXd theta_init, Schedule schedule,
        Regularizer reg = Regularizer::negative_entropy(), OracleConfig oracle = {});

  void update(const Eigen::MatrixXd& X, const Eigen::VectorXd& realized_cost,
              Rng& rng) override;
  std::string name() const override { return "df_ogd"; }

  /// Test hooks.
  void force_delta(std::optional<double> delta) { forced_delta_ = delta; }
  void skip_oracle(bool skip) { skip_oracle_ = skip; }

  const Schedule& schedule() const noexcept { return schedule_; }

 private:
  Schedule schedule_;
  Regularizer reg_;
  OracleConfig oracle_;
  std::optional<double> forced_delta_;
  bool skip_oracle_ = false;
};

class DfFtpl final : public Learner {
 public:
  /// Uses the static alpha and eta of sched for every round.
  DfFtpl(Problem problem, Eigen::VectorXd theta_init, Schedule schedule,
         Regularizer reg = Regularizer::negative_entropy(), OracleConfig oracle = {});

  void update(const Eigen::MatrixXd& X, const Eigen::VectorXd& realized_cost,
              Rng& rng) override;
  std::string name() const override { return "df_ftpl"; }

  /// sigma with independent Exp(eta) coordinates, mean 1/eta.
  static Eigen::VectorXd draw_perturbation(int m, double eta, Rng& rng);

  void zero_perturbation(bool zero) { zero_sigma_ = zero; }
  const Eigen::VectorXd& last_perturbation() const noexcept { return sigma_; }
  std::size_t history_size() const noexcept { return hist_X_.size(); }

 private:
  Schedule schedule_;
  Regularizer reg_;
  OracleConfig oracle_;
  bool zero_sigma_ = false;
  Eigen::VectorXd sigma_;
  std::vector<Eigen::MatrixXd> hist_X_;
  std::vector<Eigen::VectorXd> hist_c_;
};

class PfOgd final : public Learner {
 public:
  PfOgd(Problem problem, Eigen::VectorXd theta_init, double eta = 10.0);

  /// theta <- P(theta - eta * 2 X^T (X theta - c)).
  void update(const Eigen::MatrixXd& X, const Eigen::VectorXd& realized_cost,
              Rng& rng) override;
  std::string name() const override { return "pf_ogd"; }
};

enum class SpoVariant {
  Literal,    // -X^T v*(c_hat)
  Canonical,  // 2 X^T (v*(c) - v*(2 c_hat - c))
};

class SpoPlus final : public Learner {
 public:
  SpoPlus(Problem problem, Eigen::VectorXd theta_init, double eta,
          SpoVariant variant = SpoVariant::Canonical);

  void update(const Eigen::MatrixXd& X, const Eigen::VectorXd& realized_cost,
              Rng& rng) override;
  std::string name() const override { return "spo_plus"; }

  /// Subgradient with respect to the predicted cost (before chaining
  /// through the model).
  static Eigen::VectorXd cost_subgradient(const Eigen::VectorXd& predicted,
                                          const Eigen::VectorXd& realized,
                                          const Polytope& poly, SpoVariant variant,
                                          double kappa = 0.0);

 private:
  SpoVariant variant_;
};

/// Canonical: max_w (c - 2 c_hat)^T w + 2 c_hat^T v*(c) - c^T v*(c).
/// Literal: 2 c^T v*(c_hat) - c^T v*(c) - c_hat^T v*(c_hat).
double spo_plus_loss(const Eigen::VectorXd& predicted, const Eigen::VectorXd& realized,
                     const Polytope& poly, SpoVariant variant = SpoVariant::Canonical);

}  // namespace dfl
