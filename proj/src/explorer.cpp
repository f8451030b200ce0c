#include "oac/explorer.hpp"

#include <cmath>
#include <stdexcept>

namespace oac {

namespace {

void check_same_size(const VectorXd& a, const VectorXd& b, const char* what) {
  if (a.size() != b.size()) throw std::invalid_argument(what);
}

void check_positive(const VectorXd& sigma, const char* what) {
  if ((sigma.array() <= 0.0).any()) throw std::invalid_argument(what);
}

}  // namespace

double kl_gaussian_diag(const VectorXd& mu1, const VectorXd& sigma1,
                        const VectorXd& mu2, const VectorXd& sigma2) {
  check_same_size(mu1, mu2, "kl_gaussian_diag: mean size mismatch");
  check_same_size(sigma1, sigma2, "kl_gaussian_diag: sigma size mismatch");
  check_same_size(mu1, sigma1, "kl_gaussian_diag: mean/sigma size mismatch");
  check_positive(sigma1, "kl_gaussian_diag: nonpositive sigma");
  check_positive(sigma2, "kl_gaussian_diag: nonpositive sigma");
  double kl = 0.0;
  for (Eigen::Index i = 0; i < mu1.size(); ++i) {
    const double ratio = sigma1(i) / sigma2(i);
    const double dm = (mu1(i) - mu2(i)) / sigma2(i);
    kl += ratio * ratio - 1.0 - 2.0 * std::log(ratio) + dm * dm;
  }
  return 0.5 * kl;
}

double wasserstein_dirac(const VectorXd& mu1, const VectorXd& mu2) {
  check_same_size(mu1, mu2, "wasserstein_dirac: size mismatch");
  return 0.5 * (mu1 - mu2).squaredNorm();
}

ExplorationPolicy oac_exploration(const VectorXd& mu_t, const VectorXd& sigma_t,
                                  const VectorXd& grad_ub,
                                  double shift_multiplier) {
  check_same_size(mu_t, sigma_t, "oac_exploration: size mismatch");
  check_same_size(mu_t, grad_ub, "oac_exploration: gradient size mismatch");
  check_positive(sigma_t, "oac_exploration: nonpositive sigma");
  if (shift_multiplier < 0.0)
    throw std::invalid_argument("oac_exploration: negative shift multiplier");
  if (!grad_ub.allFinite())
    throw std::invalid_argument("oac_exploration: non-finite gradient");

  ExplorationPolicy pi;
  pi.sigma_e = sigma_t;
  const VectorXd scaled = sigma_t.array().square() * grad_ub.array();
  const double norm_sigma = std::sqrt(grad_ub.dot(scaled));
  if (norm_sigma <= 1e-12) {
    pi.mu_e = mu_t;  // flat objective: stay on the target mean
  } else {
    pi.mu_e = mu_t + (shift_multiplier / norm_sigma) * scaled;
  }
  return pi;
}

VectorXd oac_exploration_det(const VectorXd& mu_t, const VectorXd& grad_ub,
                             double shift_multiplier) {
  check_same_size(mu_t, grad_ub, "oac_exploration_det: size mismatch");
  if (shift_multiplier < 0.0)
    throw std::invalid_argument(
        "oac_exploration_det: negative shift multiplier");
  if (!grad_ub.allFinite())
    throw std::invalid_argument("oac_exploration_det: non-finite gradient");
  const double norm = grad_ub.norm();
  if (norm <= 1e-12) return mu_t;
  return mu_t + (shift_multiplier / norm) * grad_ub;
}

VectorXd oracle_solve(const VectorXd& mu_t, const VectorXd& sigma_t,
                      const VectorXd& linear_coeffs, double delta) {
  check_same_size(mu_t, sigma_t, "oracle_solve: size mismatch");
  check_same_size(mu_t, linear_coeffs, "oracle_solve: coeff size mismatch");
  check_positive(sigma_t, "oracle_solve: nonpositive sigma");
  if (delta <= 0.0) throw std::invalid_argument("oracle_solve: delta <= 0");

  const VectorXd scaled = sigma_t.array().square() * linear_coeffs.array();
  if (scaled.lpNorm<Eigen::Infinity>() == 0.0) return mu_t;

  // Stationarity gives mu(lambda) = mu_t + (1/lambda) Sigma g. The
  // constraint value 1/2 (mu-mu_t)' Sigma^-1 (mu-mu_t) is strictly
  // decreasing in lambda; bisect until it equals delta.
  auto constraint = [&](double lambda) {
    const VectorXd d = scaled / lambda;
    double q = 0.0;
    for (Eigen::Index i = 0; i < d.size(); ++i) {
      const double z = d(i) / sigma_t(i);
      q += z * z;
    }
    return 0.5 * q;
  };

  double lo = 1.0, hi = 1.0;
  int guard = 0;
  while (constraint(hi) > delta) {
    hi *= 2.0;
    if (++guard > 2000)
      throw std::runtime_error("oracle_solve: failed to bracket multiplier");
  }
  guard = 0;
  while (constraint(lo) < delta) {
    lo *= 0.5;
    if (++guard > 2000)
      throw std::runtime_error("oracle_solve: failed to bracket multiplier");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (constraint(mid) > delta) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double lambda = 0.5 * (lo + hi);
  return mu_t + scaled / lambda;
}

ShiftReport shift_report(const VectorXd& mu_t, const VectorXd& sigma_t,
                         const VectorXd& mu_e, bool deterministic) {
  ShiftReport rep;
  rep.shift = mu_e - mu_t;
  rep.norm = rep.shift.norm();
  rep.divergence = deterministic
                       ? wasserstein_dirac(mu_e, mu_t)
                       : kl_gaussian_diag(mu_e, sigma_t, mu_t, sigma_t);
  return rep;
}

}  // namespace oac
