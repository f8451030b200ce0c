#include "oac/critic.hpp"

#include <cmath>
#include <stdexcept>

namespace oac {

TwinCritic make_twin_critic(int obs_dim, int act_dim, int hidden_units,
                            Rng& rng) {
  TwinCritic c;
  c.obs_dim = obs_dim;
  c.act_dim = act_dim;
  const std::vector<int> dims = {obs_dim + act_dim, hidden_units, hidden_units,
                                 1};
  c.online1 = make_mlp(dims, rng);
  c.online2 = make_mlp(dims, rng);
  c.target1 = c.online1;
  c.target2 = c.online2;
  c.adam1 = make_adam_state(c.online1);
  c.adam2 = make_adam_state(c.online2);
  return c;
}

namespace {

VectorXd concat(const VectorXd& s, const VectorXd& a) {
  VectorXd x(s.size() + a.size());
  x << s, a;
  return x;
}

MatrixXd concat(const MatrixXd& S, const MatrixXd& A) {
  MatrixXd X(S.rows() + A.rows(), S.cols());
  X << S, A;
  return X;
}

}  // namespace

std::pair<double, double> q_values(const TwinCritic& c, const VectorXd& s,
                                   const VectorXd& a) {
  if (s.size() != c.obs_dim || a.size() != c.act_dim)
    throw std::invalid_argument("q_values: dimension mismatch");
  const VectorXd x = concat(s, a);
  return {mlp_forward(c.online1, x)(0), mlp_forward(c.online2, x)(0)};
}

BoundEstimates bounds(double q1, double q2, double beta_ub, double beta_lb) {
  BoundEstimates b;
  b.mean = 0.5 * (q1 + q2);
  b.std = 0.5 * std::abs(q1 - q2);
  b.ub = b.mean + beta_ub * b.std;
  b.lb_prime = b.mean + beta_lb * b.std;
  return b;
}

BoundEstimates bounds(const TwinCritic& c, const VectorXd& s,
                      const VectorXd& a, double beta_ub, double beta_lb) {
  const auto [q1, q2] = q_values(c, s, a);
  return bounds(q1, q2, beta_ub, beta_lb);
}

BoundBatch bound_values_and_action_grads(const TwinCritic& c,
                                         const MatrixXd& S, const MatrixXd& A,
                                         double beta) {
  const MatrixXd X = concat(S, A);
  const MatrixXd ones = MatrixXd::Ones(1, X.cols());
  const BatchGradBundle b1 = mlp_backward_batch(c.online1, X, ones);
  const BatchGradBundle b2 = mlp_backward_batch(c.online2, X, ones);
  const Eigen::RowVectorXd q1 = mlp_forward_batch(c.online1, X).row(0);
  const Eigen::RowVectorXd q2 = mlp_forward_batch(c.online2, X).row(0);

  BoundBatch out;
  out.values.resize(X.cols());
  out.action_grads.resize(c.act_dim, X.cols());
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    const double d = q1(j) - q2(j);
    // sign(0) = 0: the std term is non-differentiable at q1 == q2 and its
    // gradient is taken as zero there.
    const double sg = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
    out.values(j) = 0.5 * (q1(j) + q2(j)) + beta * 0.5 * std::abs(d);
    const VectorXd ga1 = b1.inputs.col(j).tail(c.act_dim);
    const VectorXd ga2 = b2.inputs.col(j).tail(c.act_dim);
    out.action_grads.col(j) =
        0.5 * (ga1 + ga2) + beta * sg * 0.5 * (ga1 - ga2);
  }
  return out;
}

VectorXd ub_action_gradient(const TwinCritic& c, const VectorXd& s,
                            const VectorXd& mu_t, double beta_ub) {
  const BoundBatch bb =
      bound_values_and_action_grads(c, MatrixXd(s), MatrixXd(mu_t), beta_ub);
  return bb.action_grads.col(0);
}

std::pair<double, double> td_update(TwinCritic& c,
                                    const std::vector<Transition>& batch,
                                    const GaussianPolicy& policy, double gamma,
                                    double lr, double alpha, bool soft_target,
                                    Rng& rng) {
  if (batch.empty()) throw std::invalid_argument("td_update: empty batch");
  const Eigen::Index n = static_cast<Eigen::Index>(batch.size());

  MatrixXd S(c.obs_dim, n), A(c.act_dim, n), S2(c.obs_dim, n);
  VectorXd r(n), not_done(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Transition& t = batch[j];
    S.col(j) = t.s;
    A.col(j) = t.a;
    S2.col(j) = t.s_next;
    r(j) = t.r;
    not_done(j) = t.done ? 0.0 : 1.0;
  }

  // One next action per transition, a' = mu(s') + sigma(s') .* eps.
  const PolicyParamsBatch pp = policy_params_batch(policy, S2);
  MatrixXd A2(c.act_dim, n);
  VectorXd log_pi(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    VectorXd eps(c.act_dim);
    for (int i = 0; i < c.act_dim; ++i) eps(i) = rng.normal();
    A2.col(j) = pp.mu.col(j) + pp.sigma.col(j).cwiseProduct(eps);
    log_pi(j) = gaussian_log_prob(pp.mu.col(j), pp.sigma.col(j), A2.col(j));
  }

  const MatrixXd X2 = concat(S2, A2);
  const Eigen::RowVectorXd qt1 = mlp_forward_batch(c.target1, X2).row(0);
  const Eigen::RowVectorXd qt2 = mlp_forward_batch(c.target2, X2).row(0);

  VectorXd y(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double boot = std::min(qt1(j), qt2(j));
    if (soft_target) boot -= alpha * log_pi(j);
    y(j) = r(j) + gamma * not_done(j) * boot;
  }
  if (!y.allFinite())
    throw std::runtime_error("td_update: non-finite TD target");

  const MatrixXd X = concat(S, A);
  const Eigen::RowVectorXd q1 = mlp_forward_batch(c.online1, X).row(0);
  const Eigen::RowVectorXd q2 = mlp_forward_batch(c.online2, X).row(0);

  const double loss1 = (q1.transpose() - y).squaredNorm() / n;
  const double loss2 = (q2.transpose() - y).squaredNorm() / n;

  if (lr > 0.0) {
    // d(MSE)/dq = 2 (q - y) / n; y is a constant.
    const MatrixXd up1 = 2.0 * (q1.transpose() - y).transpose() / n;
    const MatrixXd up2 = 2.0 * (q2.transpose() - y).transpose() / n;
    const MlpParams g1 = mlp_backward_batch(c.online1, X, up1).params;
    const MlpParams g2 = mlp_backward_batch(c.online2, X, up2).params;
    adam_step(c.adam1, c.online1, g1, lr);
    adam_step(c.adam2, c.online2, g2, lr);
  }
  return {loss1, loss2};
}

std::vector<SliceRow> critic_slice(const TwinCritic& c, const VectorXd& s,
                                   const VectorXd& center,
                                   const VectorXd& direction, double halfwidth,
                                   int n, double beta_ub, double beta_lb,
                                   const VectorXd& action_low,
                                   const VectorXd& action_high) {
  if (n < 1) throw std::invalid_argument("critic_slice: n must be >= 1");
  const double dn = direction.norm();
  if (dn == 0.0) throw std::invalid_argument("critic_slice: zero direction");
  const VectorXd d = direction / dn;

  // Feasible offsets: intersection of [-halfwidth, halfwidth] with the
  // action box along the ray.
  double t_lo = -halfwidth, t_hi = halfwidth;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (d(i) == 0.0) {
      if (center(i) < action_low(i) || center(i) > action_high(i))
        throw std::invalid_argument("critic_slice: ray misses action box");
      continue;
    }
    double a = (action_low(i) - center(i)) / d(i);
    double b = (action_high(i) - center(i)) / d(i);
    if (a > b) std::swap(a, b);
    t_lo = std::max(t_lo, a);
    t_hi = std::min(t_hi, b);
  }
  if (t_lo > t_hi)
    throw std::invalid_argument("critic_slice: ray misses action box");

  std::vector<SliceRow> rows;
  rows.reserve(n);
  for (int k = 0; k < n; ++k) {
    const double t =
        n == 1 ? 0.0 : t_lo + (t_hi - t_lo) * k / static_cast<double>(n - 1);
    const BoundEstimates b = bounds(c, s, center + t * d, beta_ub, beta_lb);
    rows.push_back({t, b.mean, b.ub, b.lb_prime});
  }
  return rows;
}

}  // namespace oac
