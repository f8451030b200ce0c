#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "oac/config.hpp"
#include "oac/trainer.hpp"

namespace oac {

// Last row's smoothed return; throws if the log has no evaluation rows.
double final_smoothed_return(const TrainLog& log);

// Trains and writes metrics.csv, params.bin and params.json into out_dir
// (created if missing).
TrainResult cmd_train(const RunConfig& cfg, const std::string& out_dir);

struct SweepCell {
  double value = 0.0;
  std::uint64_t seed = 0;
  double final_return_smooth = 0.0;
};

// One training run per (value, seed) with `key` overridden; key must be
// one of shift_multiplier, beta_ub, beta_lb, alpha. The CSV carries each
// cell's final smoothed return and, denormalized per row, the per-value
// mean and 90% normal-approximation confidence halfwidth
// 1.645 * sd / sqrt(n) (sd with n-1; zero when n == 1).
std::vector<SweepCell> cmd_sweep(const RunConfig& base, const std::string& key,
                                 const std::vector<double>& values,
                                 const std::vector<std::uint64_t>& seeds,
                                 const std::string& out_path);

// Bound slices along rays through the policy mean at `state`, clipped to
// the action box. One-dimensional action spaces always get the two rays
// +1 and -1; otherwise n_rays random unit directions drawn from `seed`.
void cmd_slice(const Agent& agent, const RunConfig& cfg, const VectorXd& state,
               int n_rays, int points, double halfwidth, std::uint64_t seed,
               const std::string& out_path);

struct EpgRow {
  long long step = 0;
  double mu = 0.0;
  double sigma = 0.0;
};

// Exact-gradient ascent on the closed-form objective
//   J(mu, sigma) = -(mu^2 + sigma^2) + alpha log sigma,
// the expectation of the quadratic critic -a^2 under N(mu, sigma^2) plus
// entropy up to constants:
//   mu    <- mu + lr * (-2 mu)
//   sigma <- sigma + lr * (-2 sigma + alpha / sigma).
// Row 0 is the initial point. Requires 2 * lr < 1.
std::vector<EpgRow> epg_recurrence(long long steps, double lr, double alpha,
                                   double mu0, double sigma0);
void cmd_epg_demo(long long steps, double lr, double alpha, double mu0,
                  double sigma0, const std::string& out_path);

// For each threshold, the first env_step whose return_smooth reaches it,
// per input run, or "never".
void cmd_sample_efficiency(const std::vector<std::string>& metrics_paths,
                           const std::vector<double>& thresholds,
                           const std::string& out_path);

// Gnuplot-ready aggregate curve: env_step, mean smoothed return across
// runs, and mean -+ one standard deviation.
void cmd_plot(const std::vector<std::string>& metrics_paths,
              const std::string& out_path);

}  // namespace oac
