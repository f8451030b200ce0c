#pragma once

#include <Eigen/Core>

namespace oac {

using Eigen::VectorXd;

// Shifted Gaussian used only for acting. The stochastic variant keeps the
// target policy's covariance exactly.
struct ExplorationPolicy {
  VectorXd mu_e;
  VectorXd sigma_e;
};

struct ShiftReport {
  VectorXd shift;           // mu_e - mu_t
  double norm = 0.0;        // Euclidean norm of the shift
  double divergence = 0.0;  // achieved KL (or Wasserstein, deterministic)
};

// KL(N(mu1, diag sigma1^2) || N(mu2, diag sigma2^2)) =
//   1/2 sum_i [ s1^2/s2^2 - 1 + 2 log(s2/s1) + (m1-m2)^2/s2^2 ].
double kl_gaussian_diag(const VectorXd& mu1, const VectorXd& sigma1,
                        const VectorXd& mu2, const VectorXd& sigma2);

// Wasserstein divergence between two point masses: 1/2 |mu1 - mu2|^2.
double wasserstein_dirac(const VectorXd& mu1, const VectorXd& mu2);

// Closed-form maximizer of the linearized upper bound over the KL ball of
// radius delta = shift_multiplier^2 / 2 around the target policy:
//   mu_e = mu_t + shift_multiplier * (sigma_t^2 .* g) / |g|_Sigma,
//   sigma_e = sigma_t,
// with |g|_Sigma = sqrt(sum sigma_i^2 g_i^2). A gradient with
// |g|_Sigma <= 1e-12 leaves the mean unshifted.
ExplorationPolicy oac_exploration(const VectorXd& mu_t, const VectorXd& sigma_t,
                                  const VectorXd& grad_ub,
                                  double shift_multiplier);

// Deterministic variant under the Wasserstein constraint:
//   mu_e = mu_t + shift_multiplier * g / |g|.
VectorXd oac_exploration_det(const VectorXd& mu_t, const VectorXd& grad_ub,
                             double shift_multiplier);

// Independent check: maximizes coeffs . mu subject to
//   1/2 (mu - mu_t)' diag(sigma_t^2)^-1 (mu - mu_t) <= delta
// by bisecting the Lagrange multiplier of the stationarity condition
// until the constraint is met, never using the closed form above.
VectorXd oracle_solve(const VectorXd& mu_t, const VectorXd& sigma_t,
                      const VectorXd& linear_coeffs, double delta);

ShiftReport shift_report(const VectorXd& mu_t, const VectorXd& sigma_t,
                         const VectorXd& mu_e, bool deterministic);

}  // namespace oac
