#include "oac/actor.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "oac/critic.hpp"

namespace oac {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;  // log(2 pi)

double clamp_log_std(double l) {
  return std::clamp(l, kLogStdMin, kLogStdMax);
}

}  // namespace

GaussianPolicy make_policy(int obs_dim, int act_dim, int hidden_units,
                           Rng& rng) {
  GaussianPolicy p;
  p.obs_dim = obs_dim;
  p.act_dim = act_dim;
  p.trunk = make_mlp({obs_dim, hidden_units, hidden_units, 2 * act_dim}, rng);
  return p;
}

PolicyParamsBatch policy_params_batch(const GaussianPolicy& p,
                                      const MatrixXd& S) {
  const MatrixXd out = mlp_forward_batch(p.trunk, S);
  PolicyParamsBatch pp;
  pp.mu = out.topRows(p.act_dim);
  pp.sigma = out.bottomRows(p.act_dim)
                 .array()
                 .min(kLogStdMax)
                 .max(kLogStdMin)
                 .exp();
  return pp;
}

PolicyParams policy_params(const GaussianPolicy& p, const VectorXd& s) {
  PolicyParamsBatch pp = policy_params_batch(p, MatrixXd(s));
  return {pp.mu.col(0), pp.sigma.col(0)};
}

VectorXd sample_reparam(const GaussianPolicy& p, const VectorXd& s,
                        const VectorXd& eps) {
  const PolicyParams pp = policy_params(p, s);
  return pp.mu + pp.sigma.cwiseProduct(eps);
}

double gaussian_log_prob(const VectorXd& mu, const VectorXd& sigma,
                         const VectorXd& a) {
  double lp = 0.0;
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    const double z = (a(i) - mu(i)) / sigma(i);
    lp += -0.5 * z * z - std::log(sigma(i)) - 0.5 * kLog2Pi;
  }
  return lp;
}

double log_prob(const GaussianPolicy& p, const VectorXd& s,
                const VectorXd& a) {
  const PolicyParams pp = policy_params(p, s);
  return gaussian_log_prob(pp.mu, pp.sigma, a);
}

double gaussian_entropy(const VectorXd& sigma) {
  const double half_log_2pie = 0.5 * (kLog2Pi + 1.0);
  return sigma.array().log().sum() + half_log_2pie * sigma.size();
}

namespace {

struct SurrogateEval {
  double objective = 0.0;
  MlpParams trunk_grad;  // ascent direction
  double entropy = 0.0;
};

SurrogateEval eval_surrogate(const GaussianPolicy& p, const TwinCritic& c,
                             const MatrixXd& S, const MatrixXd& eps,
                             double alpha, double beta_lb, bool want_grad) {
  const Eigen::Index n = S.cols();
  const int ad = p.act_dim;
  if (eps.rows() != ad || eps.cols() != n)
    throw std::invalid_argument("actor surrogate: eps shape mismatch");

  const MatrixXd trunk_out = mlp_forward_batch(p.trunk, S);
  const MatrixXd mu = trunk_out.topRows(ad);
  const MatrixXd l_raw = trunk_out.bottomRows(ad);
  const MatrixXd sigma =
      l_raw.array().min(kLogStdMax).max(kLogStdMin).exp();
  const MatrixXd A = mu + sigma.cwiseProduct(eps);

  const BoundBatch bb = bound_values_and_action_grads(c, S, A, beta_lb);

  SurrogateEval ev;
  double log_prob_sum = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (int i = 0; i < ad; ++i) {
      const double e = eps(i, j);
      log_prob_sum +=
          -0.5 * e * e - std::log(sigma(i, j)) - 0.5 * kLog2Pi;
    }
    ev.entropy += gaussian_entropy(sigma.col(j));
  }
  ev.entropy /= static_cast<double>(n);
  ev.objective =
      (bb.values.sum() - alpha * log_prob_sum) / static_cast<double>(n);

  if (want_grad) {
    // Upstream into the trunk output. Mean head: dJ/dmu = g_a / n.
    // Log-std head: the critic term contributes g_a .* eps .* sigma and
    // the entropy term a flat +alpha, both gated by the clamp.
    MatrixXd upstream(2 * ad, n);
    upstream.topRows(ad) = bb.action_grads / static_cast<double>(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      for (int i = 0; i < ad; ++i) {
        const bool active =
            l_raw(i, j) > kLogStdMin && l_raw(i, j) < kLogStdMax;
        upstream(ad + i, j) =
            active ? (bb.action_grads(i, j) * eps(i, j) * sigma(i, j) +
                      alpha) /
                         static_cast<double>(n)
                   : 0.0;
      }
    }
    ev.trunk_grad = mlp_backward_batch(p.trunk, S, upstream).params;
  }
  return ev;
}

}  // namespace

double actor_surrogate(const GaussianPolicy& p, const TwinCritic& c,
                       const MatrixXd& states, const MatrixXd& eps,
                       double alpha, double beta_lb) {
  return eval_surrogate(p, c, states, eps, alpha, beta_lb, false).objective;
}

MlpParams actor_surrogate_gradient(const GaussianPolicy& p,
                                   const TwinCritic& c, const MatrixXd& states,
                                   const MatrixXd& eps, double alpha,
                                   double beta_lb) {
  return eval_surrogate(p, c, states, eps, alpha, beta_lb, true).trunk_grad;
}

ActorLossReport actor_update(GaussianPolicy& p, AdamState& adam,
                             const TwinCritic& c, const MatrixXd& states,
                             double alpha, double beta_lb, double lr,
                             Rng& rng) {
  if (states.cols() == 0)
    throw std::invalid_argument("actor_update: empty batch");
  MatrixXd eps(p.act_dim, states.cols());
  for (Eigen::Index j = 0; j < eps.cols(); ++j)
    for (Eigen::Index i = 0; i < eps.rows(); ++i) eps(i, j) = rng.normal();

  const SurrogateEval ev =
      eval_surrogate(p, c, states, eps, alpha, beta_lb, true);
  if (!std::isfinite(ev.objective))
    throw std::runtime_error("actor_update: non-finite surrogate");

  ActorLossReport report;
  report.surrogate_loss = -ev.objective;
  report.entropy = ev.entropy;

  double abs_sum = 0.0;
  for (const auto& l : ev.trunk_grad.layers)
    abs_sum += l.W.cwiseAbs().sum() + l.b.cwiseAbs().sum();
  report.grad_abs_mean =
      abs_sum / static_cast<double>(ev.trunk_grad.param_count());

  // Ascent: Adam applies descent on the negated gradient. lr == 0 is a
  // no-op by contract.
  if (lr > 0.0) {
    MlpParams neg = ev.trunk_grad;
    for (auto& l : neg.layers) {
      l.W = -l.W;
      l.b = -l.b;
    }
    adam_step(adam, p.trunk, neg, lr);
  }
  return report;
}

}  // namespace oac
