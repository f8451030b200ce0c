#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "oac/actor.hpp"
#include "oac/critic.hpp"
#include "oac/env.hpp"
#include "oac/replay.hpp"

namespace oac {

enum class Mode {
  kOac,             // shifted stochastic exploration along the upper bound
  kOacDet,          // deterministic shifted exploration (Wasserstein ball)
  kSacAblation,     // sample the target policy directly (zero shift)
  kLbShiftAblation  // shift along the conservative bound's gradient instead
};

Mode mode_from_string(const std::string& s);
std::string to_string(Mode m);

struct TrainConfig {
  double gamma = 0.99;
  double tau = 0.005;
  double alpha = 0.2;
  double lr = 3e-4;
  int batch = 256;
  std::size_t buffer_capacity = 1000000;
  int gradient_steps_per_env_step = 1;
  double shift_multiplier = 6.86;
  double beta_ub = 4.66;
  double beta_lb = -3.65;
  bool soft_target = true;
  long long initial_random_steps = 1000;
  long long total_env_steps = 10000;
  long long eval_interval = 1000;
  int eval_episodes = 10;
  std::uint64_t seed = 0;
  Mode mode = Mode::kOac;
  int hidden_units = 64;
};

// Throws std::invalid_argument on any violated field constraint.
void validate(const TrainConfig& cfg);

struct EvalRow {
  long long env_step = 0;
  double return_raw = 0.0;
  double return_smooth = 0.0;
  double shift_norm = 0.0;
  double q1_loss = 0.0;
  double q2_loss = 0.0;
  double actor_loss = 0.0;
};

struct TrainLog {
  std::vector<EvalRow> rows;
  // Hash folded over every parameter value after each environment step;
  // equal hashes mean bit-identical parameter trajectories.
  std::uint64_t param_traj_hash = 1469598103934665603ULL;
};

struct Agent {
  GaussianPolicy policy;
  AdamState policy_adam;
  TwinCritic critic;
};

// Initialization order: policy trunk, then critic 1, then critic 2, all
// from the same stream.
Agent make_agent(const TrainConfig& cfg, const EnvSpec& spec, Rng& rng);

std::uint64_t fold_params(std::uint64_t h, const MlpParams& p);
std::uint64_t agent_param_hash(std::uint64_t h, const Agent& agent);

// Behavior action for one step. Steps below initial_random_steps draw
// uniformly from the action box in every mode.
VectorXd select_action(Mode mode, const GaussianPolicy& policy,
                       const TwinCritic& critic, const TrainConfig& cfg,
                       const EnvSpec& spec, const VectorXd& s,
                       long long step_index, Rng& rng);

// Exploration mean for diagnostics, matching what select_action would use
// past the warmup phase.
VectorXd exploration_mean(Mode mode, const GaussianPolicy& policy,
                          const TwinCritic& critic, const TrainConfig& cfg,
                          const VectorXd& s);

// Mean undiscounted return of the deterministic policy a = mu(s) over
// `episodes` rollouts with seeds derived from seed_base. Never touches a
// replay buffer or the random stream used for training.
double evaluate(const GaussianPolicy& policy, Env& env, int episodes,
                std::uint64_t seed_base);

struct TrainResult {
  TrainLog log;
  Agent agent;
};

// Full training loop: act with the exploration policy, store, then per
// environment step run gradient_steps_per_env_step iterations of critic
// update, actor update and Polyak target tracking. Evaluates every
// eval_interval steps on an episode seed family disjoint from training.
// Bit-deterministic given cfg.seed.
TrainResult train(const TrainConfig& cfg, Env& env);

}  // namespace oac
