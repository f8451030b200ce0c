#pragma once

#include <Eigen/Core>

#include "oac/mlp.hpp"
#include "oac/rng.hpp"

namespace oac {

struct TwinCritic;

inline constexpr double kLogStdMin = -20.0;
inline constexpr double kLogStdMax = 2.0;

// State-conditional diagonal Gaussian. The trunk maps obs_dim ->
// 2*act_dim; the first act_dim outputs are the mean head, the rest the
// log-std head, clamped into [kLogStdMin, kLogStdMax] before
// exponentiation.
struct GaussianPolicy {
  MlpParams trunk;
  int obs_dim = 0;
  int act_dim = 0;
};

GaussianPolicy make_policy(int obs_dim, int act_dim, int hidden_units,
                           Rng& rng);

struct PolicyParams {
  VectorXd mu;
  VectorXd sigma;
};

struct PolicyParamsBatch {
  MatrixXd mu;     // act_dim x n
  MatrixXd sigma;  // act_dim x n
};

PolicyParams policy_params(const GaussianPolicy& p, const VectorXd& s);
PolicyParamsBatch policy_params_batch(const GaussianPolicy& p,
                                      const MatrixXd& S);

// a = mu + sigma .* eps
VectorXd sample_reparam(const GaussianPolicy& p, const VectorXd& s,
                        const VectorXd& eps);

// Exact diagonal-Gaussian log density of action a at state s.
double log_prob(const GaussianPolicy& p, const VectorXd& s, const VectorXd& a);

double gaussian_log_prob(const VectorXd& mu, const VectorXd& sigma,
                         const VectorXd& a);

// Differential entropy of the diagonal Gaussian: sum_i (log sigma_i +
// 0.5 log 2 pi e).
double gaussian_entropy(const VectorXd& sigma);

struct ActorLossReport {
  double surrogate_loss = 0.0;  // negated ascent objective
  double entropy = 0.0;         // batch mean of the analytic entropy
  double grad_abs_mean = 0.0;   // mean |g| over trunk parameter gradients
};

// Value of the ascent objective
//   mean_i [ Q'_LB(s_i, mu + sigma .* eps_i) - alpha log pi(a_i | s_i) ]
// for frozen noise, and its exact gradient with respect to the trunk
// parameters. Critic parameters are treated as constants.
double actor_surrogate(const GaussianPolicy& p, const TwinCritic& c,
                       const MatrixXd& states, const MatrixXd& eps,
                       double alpha, double beta_lb);
MlpParams actor_surrogate_gradient(const GaussianPolicy& p,
                                   const TwinCritic& c, const MatrixXd& states,
                                   const MatrixXd& eps, double alpha,
                                   double beta_lb);

// One Adam ascent step on the surrogate, one noise draw per state.
// Throws on a non-finite surrogate with parameters untouched.
ActorLossReport actor_update(GaussianPolicy& p, AdamState& adam,
                             const TwinCritic& c, const MatrixXd& states,
                             double alpha, double beta_lb, double lr,
                             Rng& rng);

}  // namespace oac
