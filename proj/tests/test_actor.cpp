#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oac/actor.hpp"
#include "oac/critic.hpp"
#include "test_util.hpp"

using namespace oac;
using namespace oac::testutil;

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

VectorXd random_vec(int n, Rng& rng) {
  VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.normal();
  return v;
}

// Policy whose trunk has zero weights: mu and log-std come straight from
// the output bias.
GaussianPolicy bias_policy(int obs_dim, int act_dim, const VectorXd& mu_bias,
                           const VectorXd& log_std_bias) {
  Rng rng(0);
  GaussianPolicy p = make_policy(obs_dim, act_dim, 8, rng);
  for (auto& l : p.trunk.layers) {
    l.W.setZero();
    l.b.setZero();
  }
  p.trunk.layers.back().b.head(act_dim) = mu_bias;
  p.trunk.layers.back().b.tail(act_dim) = log_std_bias;
  return p;
}

// Twin critic computing exactly -|a| for 1-D actions, identical nets.
TwinCritic abs_peak_critic(int obs_dim) {
  Rng rng(0);
  TwinCritic c = make_twin_critic(obs_dim, 1, 8, rng);
  auto build = [&](MlpParams& p) {
    for (auto& l : p.layers) {
      l.W.setZero();
      l.b.setZero();
    }
    // relu(a) + relu(-a) = |a| through the first two hidden units.
    p.layers[0].W(0, obs_dim) = 1.0;
    p.layers[0].W(1, obs_dim) = -1.0;
    p.layers[1].W(0, 0) = 1.0;
    p.layers[1].W(1, 1) = 1.0;
    p.layers[2].W(0, 0) = -1.0;
    p.layers[2].W(0, 1) = -1.0;
  };
  build(c.online1);
  build(c.online2);
  c.target1 = c.online1;
  c.target2 = c.online2;
  return c;
}

}  // namespace

TEST_CASE("policy_params: zero trunk passes biases through") {
  VectorXd mu_bias(2), ls_bias(2);
  mu_bias << 0.7, -1.2;
  ls_bias << 0.0, -0.5;
  const GaussianPolicy p = bias_policy(3, 2, mu_bias, ls_bias);
  Rng rng(1);
  const PolicyParams pp = policy_params(p, random_vec(3, rng));
  CHECK(pp.mu(0) == 0.7);
  CHECK(pp.mu(1) == -1.2);
  CHECK(pp.sigma(0) == 1.0);
  CHECK(pp.sigma(1) == doctest::Approx(std::exp(-0.5)));
}

TEST_CASE("policy_params: log-std clamps at 2 and -20") {
  VectorXd mu_bias = VectorXd::Zero(1);
  const GaussianPolicy hi =
      bias_policy(1, 1, mu_bias, VectorXd::Constant(1, 5.0));
  CHECK(policy_params(hi, VectorXd::Zero(1)).sigma(0) ==
        doctest::Approx(std::exp(2.0)));
  const GaussianPolicy lo =
      bias_policy(1, 1, mu_bias, VectorXd::Constant(1, -50.0));
  CHECK(policy_params(lo, VectorXd::Zero(1)).sigma(0) ==
        doctest::Approx(std::exp(-20.0)));
}

TEST_CASE("policy_params: composition with mlp_forward") {
  Rng rng(2);
  const GaussianPolicy p = make_policy(3, 2, 16, rng);
  const VectorXd s = random_vec(3, rng);
  const VectorXd out = mlp_forward(p.trunk, s);
  const PolicyParams pp = policy_params(p, s);
  CHECK(pp.mu(0) == out(0));
  CHECK(pp.mu(1) == out(1));
  CHECK(pp.sigma(0) ==
        std::exp(std::clamp(out(2), kLogStdMin, kLogStdMax)));
  CHECK(pp.sigma(1) ==
        std::exp(std::clamp(out(3), kLogStdMin, kLogStdMax)));
}

TEST_CASE("sample_reparam: zero noise returns the mean") {
  Rng rng(3);
  const GaussianPolicy p = make_policy(2, 2, 16, rng);
  const VectorXd s = random_vec(2, rng);
  const VectorXd a = sample_reparam(p, s, VectorXd::Zero(2));
  const PolicyParams pp = policy_params(p, s);
  CHECK(a(0) == pp.mu(0));
  CHECK(a(1) == pp.mu(1));
}

TEST_CASE("sample_reparam: unit noise with unit sigma adds one") {
  const GaussianPolicy p = bias_policy(1, 1, VectorXd::Constant(1, 0.4),
                                       VectorXd::Zero(1));
  const VectorXd a = sample_reparam(p, VectorXd::Zero(1),
                                    VectorXd::Constant(1, 1.0));
  CHECK(a(0) == doctest::Approx(1.4));
}

TEST_CASE("sample_reparam: empirical mean concentrates on mu") {
  Rng rng(4);
  const GaussianPolicy p = make_policy(2, 1, 16, rng);
  const VectorXd s = random_vec(2, rng);
  const PolicyParams pp = policy_params(p, s);
  const int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i)
    sum += sample_reparam(p, s, VectorXd::Constant(1, rng.normal()))(0);
  const double tol = 4.0 * pp.sigma(0) / std::sqrt(static_cast<double>(n));
  CHECK(std::abs(sum / n - pp.mu(0)) < tol);
}

TEST_CASE("log_prob: standard normal mode in 1D") {
  const GaussianPolicy p =
      bias_policy(1, 1, VectorXd::Zero(1), VectorXd::Zero(1));
  CHECK(log_prob(p, VectorXd::Zero(1), VectorXd::Zero(1)) ==
        doctest::Approx(-0.5 * kLog2Pi).epsilon(1e-12));
}

TEST_CASE("log_prob: consistent with the reparameterized density") {
  Rng rng(5);
  const GaussianPolicy p = make_policy(2, 3, 16, rng);
  const VectorXd s = random_vec(2, rng);
  const PolicyParams pp = policy_params(p, s);
  for (int k = 0; k < 1000; ++k) {
    const VectorXd eps = random_vec(3, rng);
    const VectorXd a = sample_reparam(p, s, eps);
    // Under a = mu + sigma eps the density is the standard normal density
    // of eps divided by prod sigma.
    double expected = 0.0;
    for (int i = 0; i < 3; ++i)
      expected +=
          -0.5 * eps(i) * eps(i) - std::log(pp.sigma(i)) - 0.5 * kLog2Pi;
    CHECK(log_prob(p, s, a) == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("log_prob: doubling sigma lowers the mode density by log 2 per "
          "dimension") {
  const int d = 3;
  const GaussianPolicy p1 =
      bias_policy(1, d, VectorXd::Zero(d), VectorXd::Zero(d));
  const GaussianPolicy p2 = bias_policy(
      1, d, VectorXd::Zero(d), VectorXd::Constant(d, std::log(2.0)));
  const double lp1 = log_prob(p1, VectorXd::Zero(1), VectorXd::Zero(d));
  const double lp2 = log_prob(p2, VectorXd::Zero(1), VectorXd::Zero(d));
  CHECK(lp1 - lp2 == doctest::Approx(d * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("gaussian_entropy: strictly increasing in each sigma") {
  Rng rng(6);
  for (int k = 0; k < 100; ++k) {
    VectorXd sigma(3);
    for (int i = 0; i < 3; ++i) sigma(i) = std::exp(rng.uniform(-2.0, 2.0));
    const double h0 = gaussian_entropy(sigma);
    for (int i = 0; i < 3; ++i) {
      VectorXd bigger = sigma;
      bigger(i) *= 1.01;
      CHECK(gaussian_entropy(bigger) > h0);
    }
  }
}

TEST_CASE("actor surrogate gradient matches finite differences") {
  const double h = 1e-5;
  int accepted = 0;
  std::uint64_t seed = 0;
  while (accepted < 50) {
    ++seed;
    Rng rng(seed);
    GaussianPolicy p = make_policy(2, 1, 6, rng);
    const TwinCritic c = make_twin_critic(2, 1, 6, rng);
    const int n = 3;
    MatrixXd S(2, n), eps(1, n);
    for (int j = 0; j < n; ++j) {
      S.col(j) = random_vec(2, rng);
      eps(0, j) = rng.normal();
    }

    // Screen kinks: ReLU pre-activations in trunk and critics, the
    // |q1 - q2| crease, and the log-std clamp.
    bool ok = true;
    const PolicyParamsBatch pp = policy_params_batch(p, S);
    for (int j = 0; j < n && ok; ++j) {
      const VectorXd s = S.col(j);
      if (min_hidden_preact(p.trunk, s) < 1e-3) ok = false;
      const VectorXd a =
          pp.mu.col(j) + pp.sigma.col(j).cwiseProduct(eps.col(j));
      VectorXd x(3);
      x << s, a;
      if (min_hidden_preact(c.online1, x) < 1e-3) ok = false;
      if (min_hidden_preact(c.online2, x) < 1e-3) ok = false;
      const auto [q1, q2] = q_values(c, s, a);
      if (std::abs(q1 - q2) < 1e-4) ok = false;
      const VectorXd raw = mlp_forward(p.trunk, s);
      if (std::abs(raw(1) - kLogStdMax) < 1e-3 ||
          std::abs(raw(1) - kLogStdMin) < 1e-3)
        ok = false;
    }
    if (!ok) continue;
    ++accepted;

    const double alpha = 0.2, beta_lb = -3.65;
    const MlpParams analytic =
        actor_surrogate_gradient(p, c, S, eps, alpha, beta_lb);
    const MlpParams fd = fd_param_gradient(
        p.trunk,
        [&](const MlpParams& trunk) {
          GaussianPolicy q = p;
          q.trunk = trunk;
          return actor_surrogate(q, c, S, eps, alpha, beta_lb);
        },
        h);
    CHECK(max_rel_err(analytic, fd) < 1e-4);
  }
}

TEST_CASE("actor_update: large alpha with a constant critic grows sigma") {
  Rng rng(7);
  // Constant critic: all zero nets, so only the entropy term acts.
  TwinCritic c = make_twin_critic(2, 1, 8, rng);
  for (MlpParams* p : {&c.online1, &c.online2}) {
    for (auto& l : p->layers) {
      l.W.setZero();
      l.b.setZero();
    }
  }
  GaussianPolicy pol = make_policy(2, 1, 8, rng);
  AdamState adam = make_adam_state(pol.trunk);
  const VectorXd s = random_vec(2, rng);
  MatrixXd S(2, 4);
  for (int j = 0; j < 4; ++j) S.col(j) = s;

  const double sigma0 = policy_params(pol, s).sigma(0);
  double prev = sigma0;
  for (int k = 0; k < 100; ++k) {
    actor_update(pol, adam, c, S, 5.0, -3.65, 3e-3, rng);
    const double cur = policy_params(pol, s).sigma(0);
    CHECK(cur > prev);
    prev = cur;
  }
  CHECK(prev > sigma0);
}

TEST_CASE("actor_update: concave critic peaked at zero pulls mu to zero") {
  const TwinCritic c = abs_peak_critic(1);
  Rng rng(8);
  Rng init(9);
  GaussianPolicy pol = make_policy(1, 1, 8, init);
  AdamState adam = make_adam_state(pol.trunk);
  const MatrixXd S = MatrixXd::Zero(1, 8);

  for (int k = 0; k < 400; ++k)
    actor_update(pol, adam, c, S, 0.0, -1.0, 1e-2, rng);
  const double mu_final = policy_params(pol, VectorXd::Zero(1)).mu(0);
  CHECK(std::abs(mu_final) < 0.05);
}

TEST_CASE("actor_update: zero learning rate leaves parameters unchanged") {
  Rng rng(10);
  const TwinCritic c = make_twin_critic(2, 1, 8, rng);
  GaussianPolicy pol = make_policy(2, 1, 8, rng);
  const MlpParams before = pol.trunk;
  AdamState adam = make_adam_state(pol.trunk);
  MatrixXd S(2, 2);
  S.col(0) = random_vec(2, rng);
  S.col(1) = random_vec(2, rng);
  const ActorLossReport rep = actor_update(pol, adam, c, S, 0.2, -3.65, 0.0,
                                           rng);
  CHECK(params_equal(pol.trunk, before));
  CHECK(std::isfinite(rep.surrogate_loss));
  CHECK(std::isfinite(rep.entropy));
}

TEST_CASE("actor_update: empty batch throws") {
  Rng rng(11);
  const TwinCritic c = make_twin_critic(2, 1, 8, rng);
  GaussianPolicy pol = make_policy(2, 1, 8, rng);
  AdamState adam = make_adam_state(pol.trunk);
  MatrixXd empty(2, 0);
  CHECK_THROWS_AS(actor_update(pol, adam, c, empty, 0.2, -3.65, 1e-3, rng),
                  std::invalid_argument);
}
