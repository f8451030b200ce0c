#include "oac/trainer.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "oac/explorer.hpp"

namespace oac {

namespace {

// Seed-family tags; distinct tags keep training and evaluation episode
// seeds disjoint.
constexpr std::uint64_t kTagTrainEpisode = 0xA11CE;
constexpr std::uint64_t kTagEvalRound = 0xE7A1;
constexpr std::uint64_t kTagEvalEpisode = 0xE7A2;

constexpr std::uint64_t kHashPrime = 1099511628211ULL;

}  // namespace

Mode mode_from_string(const std::string& s) {
  if (s == "oac") return Mode::kOac;
  if (s == "oac_det") return Mode::kOacDet;
  if (s == "sac_ablation") return Mode::kSacAblation;
  if (s == "lb_shift_ablation") return Mode::kLbShiftAblation;
  throw std::invalid_argument("unknown mode: " + s);
}

std::string to_string(Mode m) {
  switch (m) {
    case Mode::kOac:
      return "oac";
    case Mode::kOacDet:
      return "oac_det";
    case Mode::kSacAblation:
      return "sac_ablation";
    case Mode::kLbShiftAblation:
      return "lb_shift_ablation";
  }
  throw std::logic_error("bad mode value");
}

void validate(const TrainConfig& cfg) {
  auto fail = [](const std::string& msg) {
    throw std::invalid_argument("config: " + msg);
  };
  if (!(cfg.gamma >= 0.0 && cfg.gamma < 1.0)) fail("gamma must be in [0, 1)");
  if (!(cfg.tau > 0.0 && cfg.tau <= 1.0)) fail("tau must be in (0, 1]");
  if (!(cfg.alpha >= 0.0)) fail("alpha must be >= 0");
  if (!(cfg.lr >= 0.0)) fail("lr must be >= 0");
  if (cfg.batch < 1) fail("batch must be >= 1");
  if (cfg.buffer_capacity < 1) fail("buffer_capacity must be >= 1");
  if (cfg.gradient_steps_per_env_step != 1 &&
      cfg.gradient_steps_per_env_step != 4)
    fail("gradient_steps_per_env_step must be 1 or 4");
  if (!(cfg.shift_multiplier >= 0.0)) fail("shift_multiplier must be >= 0");
  if (!(cfg.beta_ub >= 0.0)) fail("beta_ub must be >= 0");
  if (!std::isfinite(cfg.beta_lb)) fail("beta_lb must be finite");
  if (cfg.initial_random_steps < 0) fail("initial_random_steps must be >= 0");
  if (cfg.total_env_steps < 0) fail("total_env_steps must be >= 0");
  if (cfg.eval_interval < 1) fail("eval_interval must be >= 1");
  if (cfg.eval_episodes < 1) fail("eval_episodes must be >= 1");
  if (cfg.hidden_units < 1) fail("hidden_units must be >= 1");
}

Agent make_agent(const TrainConfig& cfg, const EnvSpec& spec, Rng& rng) {
  Agent agent;
  agent.policy = make_policy(spec.obs_dim, spec.act_dim, cfg.hidden_units, rng);
  agent.policy_adam = make_adam_state(agent.policy.trunk);
  agent.critic =
      make_twin_critic(spec.obs_dim, spec.act_dim, cfg.hidden_units, rng);
  return agent;
}

std::uint64_t fold_params(std::uint64_t h, const MlpParams& p) {
  for (const auto& l : p.layers) {
    for (Eigen::Index r = 0; r < l.W.rows(); ++r)
      for (Eigen::Index c = 0; c < l.W.cols(); ++c) {
        h ^= std::bit_cast<std::uint64_t>(l.W(r, c));
        h *= kHashPrime;
      }
    for (Eigen::Index r = 0; r < l.b.size(); ++r) {
      h ^= std::bit_cast<std::uint64_t>(l.b(r));
      h *= kHashPrime;
    }
  }
  return h;
}

std::uint64_t agent_param_hash(std::uint64_t h, const Agent& agent) {
  h = fold_params(h, agent.policy.trunk);
  h = fold_params(h, agent.critic.online1);
  h = fold_params(h, agent.critic.online2);
  h = fold_params(h, agent.critic.target1);
  h = fold_params(h, agent.critic.target2);
  return h;
}

VectorXd exploration_mean(Mode mode, const GaussianPolicy& policy,
                          const TwinCritic& critic, const TrainConfig& cfg,
                          const VectorXd& s) {
  const PolicyParams pp = policy_params(policy, s);
  switch (mode) {
    case Mode::kSacAblation:
      return pp.mu;
    case Mode::kOac: {
      const VectorXd g = ub_action_gradient(critic, s, pp.mu, cfg.beta_ub);
      return oac_exploration(pp.mu, pp.sigma, g, cfg.shift_multiplier).mu_e;
    }
    case Mode::kLbShiftAblation: {
      const VectorXd g = ub_action_gradient(critic, s, pp.mu, cfg.beta_lb);
      return oac_exploration(pp.mu, pp.sigma, g, cfg.shift_multiplier).mu_e;
    }
    case Mode::kOacDet: {
      const VectorXd g = ub_action_gradient(critic, s, pp.mu, cfg.beta_ub);
      return oac_exploration_det(pp.mu, g, cfg.shift_multiplier);
    }
  }
  throw std::logic_error("bad mode value");
}

VectorXd select_action(Mode mode, const GaussianPolicy& policy,
                       const TwinCritic& critic, const TrainConfig& cfg,
                       const EnvSpec& spec, const VectorXd& s,
                       long long step_index, Rng& rng) {
  if (step_index < cfg.initial_random_steps) {
    VectorXd a(spec.act_dim);
    for (int i = 0; i < spec.act_dim; ++i)
      a(i) = rng.uniform(spec.action_low(i), spec.action_high(i));
    return a;
  }

  const PolicyParams pp = policy_params(policy, s);
  VectorXd mu = pp.mu;
  switch (mode) {
    case Mode::kSacAblation:
      break;
    case Mode::kOac: {
      const VectorXd g = ub_action_gradient(critic, s, pp.mu, cfg.beta_ub);
      mu = oac_exploration(pp.mu, pp.sigma, g, cfg.shift_multiplier).mu_e;
      break;
    }
    case Mode::kLbShiftAblation: {
      const VectorXd g = ub_action_gradient(critic, s, pp.mu, cfg.beta_lb);
      mu = oac_exploration(pp.mu, pp.sigma, g, cfg.shift_multiplier).mu_e;
      break;
    }
    case Mode::kOacDet: {
      const VectorXd g = ub_action_gradient(critic, s, pp.mu, cfg.beta_ub);
      return oac_exploration_det(pp.mu, g, cfg.shift_multiplier);
    }
  }
  VectorXd a(mu.size());
  for (Eigen::Index i = 0; i < a.size(); ++i)
    a(i) = mu(i) + pp.sigma(i) * rng.normal();
  return a;
}

double evaluate(const GaussianPolicy& policy, Env& env, int episodes,
                std::uint64_t seed_base) {
  if (episodes < 1) throw std::invalid_argument("evaluate: episodes >= 1");
  double total = 0.0;
  for (int ep = 0; ep < episodes; ++ep) {
    VectorXd obs = env.reset(mix_seed(seed_base, kTagEvalEpisode, ep));
    while (true) {
      const StepResult sr = env.step(policy_params(policy, obs).mu);
      total += sr.reward;
      if (sr.done) break;
      obs = sr.obs;
    }
  }
  return total / episodes;
}

namespace {

double mean_shift_norm(Mode mode, const GaussianPolicy& policy,
                       const TwinCritic& critic, const TrainConfig& cfg,
                       const MatrixXd& states) {
  if (states.cols() == 0) return 0.0;
  double sum = 0.0;
  for (Eigen::Index j = 0; j < states.cols(); ++j) {
    const VectorXd s = states.col(j);
    const VectorXd mu_t = policy_params(policy, s).mu;
    sum += (exploration_mean(mode, policy, critic, cfg, s) - mu_t).norm();
  }
  return sum / static_cast<double>(states.cols());
}

}  // namespace

TrainResult train(const TrainConfig& cfg, Env& env) {
  validate(cfg);
  const EnvSpec& spec = env.spec();
  Rng rng(cfg.seed);
  TrainResult result;
  result.agent = make_agent(cfg, spec, rng);
  Agent& agent = result.agent;
  TrainLog& log = result.log;
  log.param_traj_hash = agent_param_hash(log.param_traj_hash, agent);

  ReplayBuffer buffer(cfg.buffer_capacity);
  auto eval_env = env.clone();

  std::uint64_t episode = 0;
  VectorXd obs = env.reset(mix_seed(cfg.seed, kTagTrainEpisode, episode));

  std::vector<double> raw_returns;
  MatrixXd last_batch_states;
  double q1_loss = 0.0, q2_loss = 0.0, actor_loss = 0.0;
  std::uint64_t eval_round = 0;

  for (long long step = 1; step <= cfg.total_env_steps; ++step) {
    const VectorXd a = select_action(cfg.mode, agent.policy, agent.critic, cfg,
                                     spec, obs, step - 1, rng);
    const StepResult sr = env.step(a);
    // Horizon truncation is stored as non-terminal; only true MDP ends
    // zero the bootstrap.
    const bool stored_done = sr.done && spec.terminal_at_horizon;
    buffer.push({obs, a, sr.reward, sr.obs, stored_done});
    if (sr.done) {
      ++episode;
      obs = env.reset(mix_seed(cfg.seed, kTagTrainEpisode, episode));
    } else {
      obs = sr.obs;
    }

    try {
      for (int g = 0; g < cfg.gradient_steps_per_env_step; ++g) {
        const std::vector<Transition> batch = buffer.sample(cfg.batch, rng);
        const auto losses =
            td_update(agent.critic, batch, agent.policy, cfg.gamma, cfg.lr,
                      cfg.alpha, cfg.soft_target, rng);
        q1_loss = losses.first;
        q2_loss = losses.second;

        MatrixXd states(spec.obs_dim, batch.size());
        for (std::size_t j = 0; j < batch.size(); ++j)
          states.col(static_cast<Eigen::Index>(j)) = batch[j].s;
        const ActorLossReport rep =
            actor_update(agent.policy, agent.policy_adam, agent.critic, states,
                         cfg.alpha, cfg.beta_lb, cfg.lr, rng);
        actor_loss = rep.surrogate_loss;
        last_batch_states = std::move(states);

        polyak_update(agent.critic.target1, agent.critic.online1, cfg.tau);
        polyak_update(agent.critic.target2, agent.critic.online2, cfg.tau);
      }
    } catch (const std::exception& e) {
      throw std::runtime_error("train: env step " + std::to_string(step) +
                               ": " + e.what());
    }

    log.param_traj_hash = agent_param_hash(log.param_traj_hash, agent);

    if (step % cfg.eval_interval == 0) {
      const double raw =
          evaluate(agent.policy, *eval_env, cfg.eval_episodes,
                   mix_seed(cfg.seed, kTagEvalRound, eval_round++));
      raw_returns.push_back(raw);
      const std::size_t window = std::min<std::size_t>(raw_returns.size(), 100);
      double smooth = 0.0;
      for (std::size_t i = raw_returns.size() - window; i < raw_returns.size();
           ++i)
        smooth += raw_returns[i];
      smooth /= static_cast<double>(window);

      EvalRow row;
      row.env_step = step;
      row.return_raw = raw;
      row.return_smooth = smooth;
      row.shift_norm = mean_shift_norm(cfg.mode, agent.policy, agent.critic,
                                       cfg, last_batch_states);
      row.q1_loss = q1_loss;
      row.q2_loss = q2_loss;
      row.actor_loss = actor_loss;
      log.rows.push_back(row);
    }
  }
  return result;
}

}  // namespace oac
