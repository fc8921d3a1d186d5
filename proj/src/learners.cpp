#include "dfl/learners.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "dfl/errors.hpp"

namespace dfl {

Schedule Schedule::dynamic(int n_faces, double c_alpha, double c_eta) {
  if (n_faces < 1 || !(c_alpha > 0.0) || !(c_eta > 0.0)) {
    throw InvalidInput("schedule needs n_faces >= 1 and positive constants");
  }
  Schedule s;
  s.mode = Mode::Dynamic;
  s.n_faces = n_faces;
  s.c_alpha = c_alpha;
  s.c_eta = c_eta;
  return s;
}

Schedule Schedule::static_from_horizon(int m, int n_faces, int T, double c_alpha,
                                       double c_eta) {
  if (m < 1 || n_faces < 1 || T < 1 || !(c_alpha > 0.0) || !(c_eta > 0.0)) {
    throw InvalidInput("static schedule needs m, n, T >= 1 and positive constants");
  }
  const double md = m, nd = n_faces, Td = T;
  Schedule s;
  s.mode = Mode::Static;
  s.n_faces = n_faces;
  s.c_alpha = c_alpha;
  s.c_eta = c_eta;
  s.fixed.eta = c_eta * std::pow(md, 0.25) * std::pow(Td, -0.75) / std::sqrt(nd);
  s.fixed.alpha = c_alpha * std::pow(md, 0.75) * std::sqrt(nd) * std::pow(Td, -0.25);
  return s;
}

Schedule Schedule::constant(double alpha, double eta) {
  if (!(alpha > 0.0) || !(eta > 0.0)) {
    throw InvalidInput("constant schedule needs positive alpha and eta");
  }
  Schedule s;
  s.mode = Mode::Static;
  s.fixed = {alpha, eta};
  return s;
}

StepSizes schedule_step(const Schedule& sched, int t, double path_length,
                        double eta_prev) {
  if (sched.mode == Schedule::Mode::Static) return sched.fixed;
  if (t < 1 || path_length < 0.0 || !(eta_prev > 0.0)) {
    throw InvalidInput("schedule_step needs t >= 1, P >= 0, eta_prev > 0");
  }
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(sched.n_faces));
  const double ratio = (1.0 + path_length) / static_cast<double>(t);
  StepSizes out;
  out.alpha = sched.c_alpha * inv_sqrt_n * std::pow(ratio, 0.25);
  out.eta = std::min(eta_prev, sched.c_eta * inv_sqrt_n * std::pow(ratio, 0.75));
  return out;
}

Learner::Learner(Problem problem, Eigen::VectorXd theta_init)
    : problem_(std::move(problem)) {
  if (!problem_.poly || !problem_.model) {
    throw InvalidInput("learner needs a polytope and a model");
  }
  if (problem_.model->dim_cost() != problem_.poly->dim()) {
    throw InvalidInput("model cost dimension does not match polytope");
  }
  if (problem_.model->dim_theta() != problem_.domain.dim()) {
    throw InvalidInput("model parameter dimension does not match Theta");
  }
  if (theta_init.size() != problem_.domain.dim() || !theta_init.allFinite()) {
    throw InvalidInput("initial theta has wrong dimension or is not finite");
  }
  if (!(problem_.kappa >= 0.0)) throw InvalidInput("kappa must be >= 0");
  state_.theta = problem_.domain.project(theta_init);
  state_.oracle_warm = state_.theta;
  state_.eta_prev = std::numeric_limits<double>::infinity();
}

Action Learner::act(const Eigen::MatrixXd& X) const {
  if (!X.allFinite()) throw InvalidInput("features are not finite");
  Action a;
  a.predicted_cost = problem_.model->predict(state_.theta, X);
  LpResult lp = lp_argmin(a.predicted_cost, *problem_.poly, problem_.kappa);
  a.w = std::move(lp.point);
  a.vertex_index = lp.vertex_index;
  return a;
}

void Learner::check_round_input(const Eigen::MatrixXd& X,
                                const Eigen::VectorXd& realized_cost) const {
  if (!X.allFinite() || !realized_cost.allFinite()) {
    throw InvalidInput("round data is not finite");
  }
  if (realized_cost.size() != problem_.poly->dim()) {
    throw InvalidInput("realized cost dimension does not match polytope");
  }
}

namespace {

class SingleSurrogate final : public Objective {
 public:
  SingleSurrogate(const Problem& p, const Eigen::MatrixXd& X,
                  const Eigen::VectorXd& c, double alpha, const Regularizer& reg)
      : p_(p), X_(X), c_(c), alpha_(alpha), reg_(reg) {}

  double value(const Eigen::VectorXd& theta) const override {
    return surrogate_loss(theta, X_, c_, alpha_, *p_.model, *p_.poly, reg_);
  }
  Eigen::VectorXd gradient(const Eigen::VectorXd& theta, Rng&) const override {
    return surrogate_gradient(theta, X_, c_, alpha_, *p_.model, *p_.poly, reg_);
  }

 private:
  const Problem& p_;
  const Eigen::MatrixXd& X_;
  const Eigen::VectorXd& c_;
  double alpha_;
  const Regularizer& reg_;
};

/// (1/t) (sum_i f~_i(theta) - <sigma, theta>), gradient from a minibatch.
class PerturbedCumulative final : public Objective {
 public:
  PerturbedCumulative(const Problem& p, const std::vector<Eigen::MatrixXd>& X,
                      const std::vector<Eigen::VectorXd>& c,
                      const Eigen::VectorXd& sigma, double alpha,
                      const Regularizer& reg, int batch)
      : p_(p), X_(X), c_(c), sigma_(sigma), alpha_(alpha), reg_(reg), batch_(batch) {}

  double value(const Eigen::VectorXd& theta) const override {
    double s = 0.0;
    for (std::size_t i = 0; i < X_.size(); ++i) {
      s += surrogate_loss(theta, X_[i], c_[i], alpha_, *p_.model, *p_.poly, reg_);
    }
    return (s - sigma_.dot(theta)) / static_cast<double>(X_.size());
  }

  Eigen::VectorXd gradient(const Eigen::VectorXd& theta, Rng& rng) const override {
    const std::size_t t = X_.size();
    const double td = static_cast<double>(t);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(theta.size());
    if (t <= static_cast<std::size_t>(batch_)) {
      for (std::size_t i = 0; i < t; ++i) g += term(theta, i);
      g /= td;
    } else {
      // Floyd's sampling of batch distinct indices.
      std::vector<std::size_t> idx;
      idx.reserve(batch_);
      for (std::size_t j = t - batch_; j < t; ++j) {
        std::uniform_int_distribution<std::size_t> pick(0, j);
        const std::size_t r = pick(rng);
        idx.push_back(std::find(idx.begin(), idx.end(), r) == idx.end() ? r : j);
      }
      for (std::size_t i : idx) g += term(theta, i);
      g /= static_cast<double>(batch_);
    }
    return g - sigma_ / td;
  }

 private:
  Eigen::VectorXd term(const Eigen::VectorXd& theta, std::size_t i) const {
    return eval_surrogate(theta, X_[i], c_[i], alpha_, *p_.model, *p_.poly, reg_)
        .gradient;
  }

  const Problem& p_;
  const std::vector<Eigen::MatrixXd>& X_;
  const std::vector<Eigen::VectorXd>& c_;
  const Eigen::VectorXd& sigma_;
  double alpha_;
  const Regularizer& reg_;
  int batch_;
};

}  // namespace

DfOgd::DfOgd(Problem problem, Eigen::VectorXd theta_init, Schedule schedule,
             Regularizer reg, OracleConfig oracle)
    : Learner(std::move(problem), std::move(theta_init)),
      schedule_(schedule),
      reg_(reg),
      oracle_(oracle) {
  oracle_.validate();
  state_.alpha = schedule_step(schedule_, 1, 0.0, 1.0).alpha;
}

void DfOgd::update(const Eigen::MatrixXd& X, const Eigen::VectorXd& realized_cost,
                   Rng& rng) {
  check_round_input(X, realized_cost);
  const int t = state_.round + 1;

  Eigen::VectorXd vartheta;
  if (skip_oracle_) {
    vartheta = state_.theta;
  } else {
    const SingleSurrogate f(problem_, X, realized_cost, state_.alpha, reg_);
    vartheta = approx_minimize(f, state_.oracle_warm, problem_.domain, oracle_, rng)
                   .theta_hat;
  }
  if (t >= 2) state_.path_length += (vartheta - state_.oracle_warm).norm();
  state_.oracle_warm = vartheta;

  const StepSizes step = schedule_step(schedule_, t, state_.path_length, state_.eta_prev);
  state_.eta_prev = step.eta;

  double delta;
  if (forced_delta_) {
    delta = *forced_delta_;
  } else {
    delta = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  }
  const Eigen::VectorXd u = vartheta + delta * (state_.theta - vartheta);
  const Eigen::VectorXd grad = surrogate_gradient(
      u, X, realized_cost, step.alpha, *problem_.model, *problem_.poly, reg_);
  state_.theta = problem_.domain.project(state_.theta - step.eta * grad);
  state_.alpha = step.alpha;
  state_.eta = step.eta;
  state_.round = t;
}

DfFtpl::DfFtpl(Problem problem, Eigen::VectorXd theta_init, Schedule schedule,
               Regularizer reg, OracleConfig oracle)
    : Learner(std::move(problem), std::move(theta_init)),
      schedule_(schedule),
      reg_(reg),
      oracle_(oracle) {
  if (schedule_.mode != Schedule::Mode::Static) {
    throw InvalidInput("DF-FTPL needs a static schedule");
  }
  oracle_.validate();
  state_.alpha = schedule_.fixed.alpha;
  state_.eta = schedule_.fixed.eta;
  state_.eta_prev = schedule_.fixed.eta;
}

Eigen::VectorXd DfFtpl::draw_perturbation(int m, double eta, Rng& rng) {
  if (!(eta > 0.0)) throw InvalidInput("perturbation rate must be > 0");
  std::exponential_distribution<double> exp(eta);
  Eigen::VectorXd s(m);
  for (int j = 0; j < m; ++j) s(j) = exp(rng);
  return s;
}

void DfFtpl::update(const Eigen::MatrixXd& X, const Eigen::VectorXd& realized_cost,
                    Rng& rng) {
  check_round_input(X, realized_cost);
  hist_X_.push_back(X);
  hist_c_.push_back(realized_cost);
  const int m = problem_.domain.dim();
  sigma_ = zero_sigma_ ? Eigen::VectorXd::Zero(m)
                       : draw_perturbation(m, schedule_.fixed.eta, rng);

  const PerturbedCumulative f(problem_, hist_X_, hist_c_, sigma_, schedule_.fixed.alpha,
                              reg_, oracle_.batch);
  const OracleResult r =
      approx_minimize(f, state_.oracle_warm, problem_.domain, oracle_, rng);
  if (state_.round >= 1) state_.path_length += (r.theta_hat - state_.oracle_warm).norm();
  state_.oracle_warm = r.theta_hat;
  state_.theta = r.theta_hat;
  state_.round += 1;
}

PfOgd::PfOgd(Problem problem, Eigen::VectorXd theta_init, double eta)
    : Learner(std::move(problem), std::move(theta_init)) {
  if (!(eta > 0.0)) throw InvalidInput("PF-OGD step size must be > 0");
  state_.eta = eta;
  state_.eta_prev = eta;
}

void PfOgd::update(const Eigen::MatrixXd& X, const Eigen::VectorXd& realized_cost,
                   Rng&) {
  check_round_input(X, realized_cost);
  const Eigen::VectorXd resid = problem_.model->predict(state_.theta, X) - realized_cost;
  const Eigen::VectorXd grad =
      2.0 * problem_.model->jacobian(state_.theta, X).transpose() * resid;
  state_.theta = problem_.domain.project(state_.theta - state_.eta * grad);
  state_.round += 1;
}

SpoPlus::SpoPlus(Problem problem, Eigen::VectorXd theta_init, double eta,
                 SpoVariant variant)
    : Learner(std::move(problem), std::move(theta_init)), variant_(variant) {
  if (!(eta > 0.0)) throw InvalidInput("SPO+ step size must be > 0");
  state_.eta = eta;
  state_.eta_prev = eta;
}

Eigen::VectorXd SpoPlus::cost_subgradient(const Eigen::VectorXd& predicted,
                                          const Eigen::VectorXd& realized,
                                          const Polytope& poly, SpoVariant variant,
                                          double kappa) {
  if (variant == SpoVariant::Literal) {
    return -lp_argmin(predicted, poly, kappa).point;
  }
  const Eigen::VectorXd v_true = lp_argmin(realized, poly, kappa).point;
  const Eigen::VectorXd v_pert = lp_argmin(2.0 * predicted - realized, poly, kappa).point;
  return 2.0 * (v_true - v_pert);
}

void SpoPlus::update(const Eigen::MatrixXd& X, const Eigen::VectorXd& realized_cost,
                     Rng&) {
  check_round_input(X, realized_cost);
  const Eigen::VectorXd c_hat = problem_.model->predict(state_.theta, X);
  const Eigen::VectorXd gc =
      cost_subgradient(c_hat, realized_cost, *problem_.poly, variant_, problem_.kappa);
  const Eigen::VectorXd grad = problem_.model->jacobian(state_.theta, X).transpose() * gc;
  state_.theta = problem_.domain.project(state_.theta - state_.eta * grad);
  state_.round += 1;
}

double spo_plus_loss(const Eigen::VectorXd& predicted, const Eigen::VectorXd& realized,
                     const Polytope& poly, SpoVariant variant) {
  const Eigen::VectorXd v_true = lp_argmin(realized, poly).point;
  if (variant == SpoVariant::Literal) {
    const Eigen::VectorXd v_hat = lp_argmin(predicted, poly).point;
    return 2.0 * realized.dot(v_hat) - realized.dot(v_true) - predicted.dot(v_hat);
  }
  const Eigen::VectorXd shifted = 2.0 * predicted - realized;
  const Eigen::VectorXd v_pert = lp_argmin(shifted, poly).point;
  return -shifted.dot(v_pert) + 2.0 * predicted.dot(v_true) - realized.dot(v_true);
}

}  // namespace dfl
