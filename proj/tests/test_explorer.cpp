#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "oac/explorer.hpp"
#include "oac/rng.hpp"

using namespace oac;

namespace {

VectorXd random_vec(int n, Rng& rng) {
  VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.normal();
  return v;
}

VectorXd random_sigma(int n, Rng& rng, double lo = 0.1, double hi = 3.0) {
  VectorXd v(n);
  for (int i = 0; i < n; ++i)
    v(i) = std::exp(rng.uniform(std::log(lo), std::log(hi)));
  return v;
}

// Numerically stable angle between two vectors.
double angle_between(const VectorXd& u, const VectorXd& v) {
  const VectorXd un = u / u.norm();
  const VectorXd vn = v / v.norm();
  if (un.dot(vn) >= 0.0) return 2.0 * std::asin(0.5 * (un - vn).norm());
  return std::numbers::pi - 2.0 * std::asin(0.5 * (un + vn).norm());
}

}  // namespace

TEST_CASE("kl_gaussian_diag: identical distributions give zero") {
  Rng rng(1);
  const VectorXd mu = random_vec(4, rng);
  const VectorXd sigma = random_sigma(4, rng);
  CHECK(kl_gaussian_diag(mu, sigma, mu, sigma) == 0.0);
}

TEST_CASE("kl_gaussian_diag: unit mean offset in 1D gives 1/2") {
  const VectorXd one = VectorXd::Constant(1, 1.0);
  const VectorXd zero = VectorXd::Zero(1);
  CHECK(kl_gaussian_diag(one, one, zero, one) == doctest::Approx(0.5));
}

TEST_CASE("kl_gaussian_diag: matches a Monte Carlo estimate of E[log p/q]") {
  Rng rng(42);
  const VectorXd mu1 = random_vec(3, rng);
  const VectorXd s1 = random_sigma(3, rng, 0.5, 2.0);
  const VectorXd mu2 = random_vec(3, rng);
  const VectorXd s2 = random_sigma(3, rng, 0.5, 2.0);
  const double exact = kl_gaussian_diag(mu1, s1, mu2, s2);

  const int n = 1000000;
  double sum = 0.0, sumsq = 0.0;
  for (int k = 0; k < n; ++k) {
    double log_ratio = 0.0;
    for (int i = 0; i < 3; ++i) {
      const double x = mu1(i) + s1(i) * rng.normal();
      const double zp = (x - mu1(i)) / s1(i);
      const double zq = (x - mu2(i)) / s2(i);
      log_ratio += (-0.5 * zp * zp - std::log(s1(i))) -
                   (-0.5 * zq * zq - std::log(s2(i)));
    }
    sum += log_ratio;
    sumsq += log_ratio * log_ratio;
  }
  const double mc = sum / n;
  const double se =
      std::sqrt((sumsq / n - mc * mc) / static_cast<double>(n - 1));
  CHECK(std::abs(mc - exact) < 3.0 * se);
}

TEST_CASE("kl_gaussian_diag: nonpositive sigma throws") {
  const VectorXd z = VectorXd::Zero(2);
  const VectorXd ones = VectorXd::Ones(2);
  VectorXd bad = ones;
  bad(1) = 0.0;
  CHECK_THROWS_AS(kl_gaussian_diag(z, bad, z, ones), std::invalid_argument);
  CHECK_THROWS_AS(kl_gaussian_diag(z, ones, z, -ones), std::invalid_argument);
}

TEST_CASE("wasserstein_dirac: values and symmetry") {
  CHECK(wasserstein_dirac(VectorXd::Ones(3), VectorXd::Ones(3)) == 0.0);
  CHECK(wasserstein_dirac(VectorXd::Constant(1, 2.0), VectorXd::Zero(1)) ==
        doctest::Approx(2.0));
  Rng rng(3);
  const VectorXd a = random_vec(5, rng);
  const VectorXd b = random_vec(5, rng);
  CHECK(wasserstein_dirac(a, b) == wasserstein_dirac(b, a));
  CHECK_THROWS_AS(wasserstein_dirac(a, VectorXd::Zero(3)),
                  std::invalid_argument);
}

TEST_CASE("oac_exploration: zero gradient leaves the mean in place") {
  Rng rng(4);
  const VectorXd mu = random_vec(3, rng);
  const VectorXd sigma = random_sigma(3, rng);
  const ExplorationPolicy pi =
      oac_exploration(mu, sigma, VectorXd::Zero(3), 6.86);
  CHECK((pi.mu_e - mu).cwiseAbs().maxCoeff() == 0.0);
  CHECK((pi.sigma_e - sigma).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("oac_exploration: 1D closed form and its KL budget") {
  const VectorXd mu = VectorXd::Constant(1, 0.3);
  const VectorXd sigma = VectorXd::Ones(1);
  const VectorXd g = VectorXd::Constant(1, 3.0);
  const ExplorationPolicy pi = oac_exploration(mu, sigma, g, 1.0);
  CHECK(pi.mu_e(0) == doctest::Approx(1.3).epsilon(1e-15));
  CHECK(kl_gaussian_diag(pi.mu_e, pi.sigma_e, mu, sigma) ==
        doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("oac_exploration: covariance is the target's, bitwise") {
  Rng rng(5);
  for (int k = 0; k < 50; ++k) {
    const int d = 1 + static_cast<int>(rng.uniform_index(6));
    const VectorXd mu = random_vec(d, rng);
    const VectorXd sigma = random_sigma(d, rng);
    const VectorXd g = random_vec(d, rng);
    const ExplorationPolicy pi = oac_exploration(mu, sigma, g, 3.0);
    REQUIRE(pi.sigma_e.size() == sigma.size());
    for (int i = 0; i < d; ++i) CHECK(pi.sigma_e(i) == sigma(i));
  }
}

TEST_CASE("oac_exploration: the KL constraint is active at the optimum") {
  Rng rng(6);
  for (int k = 0; k < 200; ++k) {
    const int d = 1 + static_cast<int>(rng.uniform_index(8));
    const VectorXd mu = random_vec(d, rng);
    const VectorXd sigma = random_sigma(d, rng, 0.05, 5.0);
    const VectorXd g = random_vec(d, rng);
    const double s = rng.uniform(0.05, 12.0);
    const ExplorationPolicy pi = oac_exploration(mu, sigma, g, s);
    const double delta = 0.5 * s * s;
    CHECK(std::abs(kl_gaussian_diag(pi.mu_e, pi.sigma_e, mu, sigma) - delta) <
          1e-9 * std::max(1.0, delta));
  }
}

TEST_CASE("oac_exploration: shift is a positive multiple of Sigma grad") {
  Rng rng(7);
  for (int k = 0; k < 100; ++k) {
    const int d = 2 + static_cast<int>(rng.uniform_index(5));
    const VectorXd mu = random_vec(d, rng);
    const VectorXd sigma = random_sigma(d, rng);
    const VectorXd g = random_vec(d, rng);
    const ExplorationPolicy pi = oac_exploration(mu, sigma, g, 2.0);
    const VectorXd scaled = sigma.array().square() * g.array();
    CHECK(angle_between(pi.mu_e - mu, scaled) < 1e-9);
  }
}

TEST_CASE("oac_exploration: scale of the gradient cancels") {
  Rng rng(8);
  const VectorXd mu = random_vec(4, rng);
  const VectorXd sigma = random_sigma(4, rng);
  const VectorXd g = random_vec(4, rng);
  const VectorXd m1 = oac_exploration(mu, sigma, g, 3.0).mu_e;
  for (const double c : {1e-3, 0.7, 13.0, 1e4}) {
    const VectorXd mc = oac_exploration(mu, sigma, VectorXd(c * g), 3.0).mu_e;
    for (int i = 0; i < 4; ++i)
      CHECK(mc(i) == doctest::Approx(m1(i)).epsilon(1e-12));
  }
}

TEST_CASE("oac_exploration: non-finite gradient throws") {
  const VectorXd mu = VectorXd::Zero(2);
  const VectorXd sigma = VectorXd::Ones(2);
  VectorXd g = VectorXd::Ones(2);
  g(0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(oac_exploration(mu, sigma, g, 1.0), std::invalid_argument);
}

TEST_CASE("oac_exploration_det: unit-scaled shift and Wasserstein budget") {
  Rng rng(9);
  for (int k = 0; k < 100; ++k) {
    const int d = 1 + static_cast<int>(rng.uniform_index(6));
    const VectorXd mu = random_vec(d, rng);
    const VectorXd g = random_vec(d, rng);
    const double s = rng.uniform(0.1, 12.0);
    const VectorXd mu_e = oac_exploration_det(mu, g, s);
    CHECK((mu_e - mu).norm() == doctest::Approx(s).epsilon(1e-12));
    CHECK(wasserstein_dirac(mu_e, mu) ==
          doctest::Approx(0.5 * s * s).epsilon(1e-12));
  }
}

TEST_CASE("oac_exploration_det: normalizes the gradient direction") {
  VectorXd mu = VectorXd::Zero(2);
  VectorXd g(2);
  g << 3.0, 4.0;
  const VectorXd mu_e = oac_exploration_det(mu, g, 1.0);
  CHECK(mu_e(0) == doctest::Approx(0.6));
  CHECK(mu_e(1) == doctest::Approx(0.8));
}

TEST_CASE("oac_exploration_det: matches the stochastic form for isotropic "
          "sigma") {
  Rng rng(10);
  const VectorXd mu = random_vec(3, rng);
  const VectorXd g = random_vec(3, rng);
  const VectorXd det = oac_exploration_det(mu, g, 2.0);
  const VectorXd sto = oac_exploration(mu, VectorXd::Ones(3), g, 2.0).mu_e;
  for (int i = 0; i < 3; ++i)
    CHECK(det(i) == doctest::Approx(sto(i)).epsilon(1e-12));
}

TEST_CASE("oracle_solve: agrees with the closed form") {
  Rng rng(11);
  for (int k = 0; k < 200; ++k) {
    const int d = 1 + static_cast<int>(rng.uniform_index(8));
    const VectorXd mu = random_vec(d, rng);
    const VectorXd sigma = random_sigma(d, rng, 0.01, 10.0);
    const VectorXd g = random_vec(d, rng);
    const double delta = rng.uniform(0.01, 72.0);
    const VectorXd closed =
        oac_exploration(mu, sigma, g, std::sqrt(2.0 * delta)).mu_e;
    const VectorXd oracle = oracle_solve(mu, sigma, g, delta);
    CHECK((closed - oracle).norm() <= 1e-6 * std::max(1.0, closed.norm()));
  }
}

TEST_CASE("oracle_solve: shrinking ball pins the mean") {
  Rng rng(12);
  const VectorXd mu = random_vec(4, rng);
  const VectorXd sigma = random_sigma(4, rng);
  const VectorXd g = random_vec(4, rng);
  const VectorXd m = oracle_solve(mu, sigma, g, 1e-14);
  CHECK((m - mu).norm() < 1e-5);
  CHECK((oracle_solve(mu, sigma, VectorXd::Zero(4), 0.5) - mu).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("oracle_solve: rejects bad delta") {
  const VectorXd z = VectorXd::Zero(2);
  const VectorXd ones = VectorXd::Ones(2);
  CHECK_THROWS_AS(oracle_solve(z, ones, ones, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(oracle_solve(z, ones, ones, -1.0), std::invalid_argument);
}

TEST_CASE("oac_exploration: optimal among KL-ball boundary points") {
  Rng rng(13);
  for (int rep = 0; rep < 10; ++rep) {
    const int d = 2 + static_cast<int>(rng.uniform_index(4));
    const VectorXd mu = random_vec(d, rng);
    const VectorXd sigma = random_sigma(d, rng);
    const VectorXd g = random_vec(d, rng);
    const double s = rng.uniform(0.5, 6.0);
    const VectorXd mu_e = oac_exploration(mu, sigma, g, s).mu_e;
    const double best = g.dot(mu_e);
    for (int k = 0; k < 100; ++k) {
      VectorXd u = random_vec(d, rng);
      u /= u.norm();
      // Boundary of the KL ball: mu + s * (sigma .* u), same budget.
      const VectorXd boundary =
          mu + VectorXd(s * (sigma.array() * u.array()));
      CHECK(g.dot(boundary) <= best + 1e-9 * std::max(1.0, std::abs(best)));
    }
  }
}

TEST_CASE("shift_report: norm and achieved divergence") {
  Rng rng(14);
  const VectorXd mu = random_vec(3, rng);
  const VectorXd sigma = random_sigma(3, rng);
  const VectorXd g = random_vec(3, rng);
  const ExplorationPolicy pi = oac_exploration(mu, sigma, g, 2.0);
  const ShiftReport rep = shift_report(mu, sigma, pi.mu_e, false);
  CHECK(rep.norm == doctest::Approx((pi.mu_e - mu).norm()));
  CHECK(rep.divergence == doctest::Approx(2.0).epsilon(1e-9));

  const VectorXd mu_d = oac_exploration_det(mu, g, 2.0);
  const ShiftReport rep_d = shift_report(mu, sigma, mu_d, true);
  CHECK(rep_d.divergence == doctest::Approx(2.0).epsilon(1e-12));
}
