#pragma once

#include <Eigen/Core>
#include <utility>
#include <vector>

#include "oac/actor.hpp"
#include "oac/mlp.hpp"
#include "oac/replay.hpp"
#include "oac/rng.hpp"

namespace oac {

// Two independently initialized critics over concatenated (s, a) inputs,
// each with a slowly tracking target copy and its own Adam state.
struct TwinCritic {
  MlpParams online1;
  MlpParams online2;
  MlpParams target1;
  MlpParams target2;
  AdamState adam1;
  AdamState adam2;
  int obs_dim = 0;
  int act_dim = 0;
};

// Targets start as exact copies of the online networks.
TwinCritic make_twin_critic(int obs_dim, int act_dim, int hidden_units,
                            Rng& rng);

struct BoundEstimates {
  double mean = 0.0;
  double std = 0.0;
  double ub = 0.0;
  double lb_prime = 0.0;
};

std::pair<double, double> q_values(const TwinCritic& c, const VectorXd& s,
                                   const VectorXd& a);

// mean = (q1+q2)/2, std = |q1-q2|/2 (population std of two values),
// ub = mean + beta_ub std, lb_prime = mean + beta_lb std.
BoundEstimates bounds(double q1, double q2, double beta_ub, double beta_lb);
BoundEstimates bounds(const TwinCritic& c, const VectorXd& s,
                      const VectorXd& a, double beta_ub, double beta_lb);

// Per-sample values of mean + beta std and their gradients in the action
// coordinates. Columns of S/A are samples.
struct BoundBatch {
  Eigen::RowVectorXd values;
  MatrixXd action_grads;  // act_dim x n
};
BoundBatch bound_values_and_action_grads(const TwinCritic& c,
                                         const MatrixXd& S, const MatrixXd& A,
                                         double beta);

// Gradient of mean + beta_ub std in the action at a = mu_t, combined from
// the two per-network input gradients. The std term's gradient is defined
// as zero where q1 == q2.
VectorXd ub_action_gradient(const TwinCritic& c, const VectorXd& s,
                            const VectorXd& mu_t, double beta_ub);

// One Adam step per online net on the squared error to
//   y = r + gamma (1-done) [ min(target1, target2)(s', a')
//                            - alpha log pi(a'|s') ]          (soft)
//   y = r + gamma (1-done)   min(target1, target2)(s', a')    (otherwise)
// with one a' ~ pi(.|s') per transition and y held constant. Returns the
// pre-update mean squared errors. Throws on a non-finite target with no
// update applied.
std::pair<double, double> td_update(TwinCritic& c,
                                    const std::vector<Transition>& batch,
                                    const GaussianPolicy& policy, double gamma,
                                    double lr, double alpha, bool soft_target,
                                    Rng& rng);

struct SliceRow {
  double offset = 0.0;
  double mean = 0.0;
  double ub = 0.0;
  double lb = 0.0;
};

// Bounds sampled at n evenly spaced points along the segment
// center + t * direction/|direction|, t in [-halfwidth, halfwidth],
// clipped to the action box. n == 1 evaluates at the center.
std::vector<SliceRow> critic_slice(const TwinCritic& c, const VectorXd& s,
                                   const VectorXd& center,
                                   const VectorXd& direction, double halfwidth,
                                   int n, double beta_ub, double beta_lb,
                                   const VectorXd& action_low,
                                   const VectorXd& action_high);

}  // namespace oac
