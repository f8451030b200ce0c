#include "oac/env.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "oac/rng.hpp"

namespace oac {

namespace {

constexpr double kPi = std::numbers::pi;

VectorXd clip_action(const VectorXd& a, const EnvSpec& spec) {
  if (a.size() != spec.act_dim)
    throw std::invalid_argument("env step: action dimension mismatch");
  if (!a.allFinite())
    throw std::invalid_argument("env step: non-finite action");
  return a.cwiseMax(spec.action_low).cwiseMin(spec.action_high);
}

EnvSpec bandit_spec() {
  EnvSpec s;
  s.obs_dim = 1;
  s.act_dim = 1;
  s.action_low = VectorXd::Constant(1, -5.0);
  s.action_high = VectorXd::Constant(1, 5.0);
  s.max_episode_steps = 1;
  s.terminal_at_horizon = true;
  return s;
}

}  // namespace

double rbf_reward(const std::vector<RbfBump>& bumps, double slope, double a) {
  double r = slope * a;
  for (const auto& b : bumps) {
    const double z = (a - b.center) / b.width;
    r += b.height * std::exp(-0.5 * z * z);
  }
  return r;
}

RbfBandit::RbfBandit(std::vector<RbfBump> bumps, double slope)
    : spec_(bandit_spec()), bumps_(std::move(bumps)), slope_(slope) {
  for (const auto& b : bumps_)
    if (b.width <= 0.0)
      throw std::invalid_argument("rbf_bandit: bump width must be positive");
}

VectorXd RbfBandit::reset(std::uint64_t) {
  steps_ = 0;
  return VectorXd::Zero(1);
}

StepResult RbfBandit::step(const VectorXd& action) {
  const VectorXd a = clip_action(action, spec_);
  ++steps_;
  return {VectorXd::Zero(1), rbf_reward(bumps_, slope_, a(0)),
          steps_ >= spec_.max_episode_steps};
}

std::unique_ptr<Env> RbfBandit::clone() const {
  return std::make_unique<RbfBandit>(bumps_, slope_);
}

QuadraticBandit::QuadraticBandit() : spec_(bandit_spec()) {}

VectorXd QuadraticBandit::reset(std::uint64_t) {
  steps_ = 0;
  return VectorXd::Zero(1);
}

StepResult QuadraticBandit::step(const VectorXd& action) {
  const VectorXd a = clip_action(action, spec_);
  ++steps_;
  return {VectorXd::Zero(1), -a(0) * a(0), steps_ >= spec_.max_episode_steps};
}

std::unique_ptr<Env> QuadraticBandit::clone() const {
  return std::make_unique<QuadraticBandit>();
}

Pendulum::Pendulum() {
  spec_.obs_dim = 3;
  spec_.act_dim = 1;
  spec_.action_low = VectorXd::Constant(1, -2.0);
  spec_.action_high = VectorXd::Constant(1, 2.0);
  spec_.max_episode_steps = 200;
  spec_.terminal_at_horizon = false;
}

double Pendulum::wrap_angle(double theta) {
  double t = std::fmod(theta + kPi, 2.0 * kPi);
  if (t <= 0.0) t += 2.0 * kPi;
  return t - kPi;
}

VectorXd Pendulum::observe() const {
  VectorXd o(3);
  o << std::cos(theta_), std::sin(theta_), theta_dot_;
  return o;
}

VectorXd Pendulum::reset(std::uint64_t seed) {
  Rng rng(seed);
  // theta uniform in (-pi, pi], theta_dot uniform in (-1, 1).
  theta_ = kPi - rng.uniform() * 2.0 * kPi;
  theta_dot_ = rng.uniform(-1.0, 1.0);
  steps_ = 0;
  return observe();
}

StepResult Pendulum::step(const VectorXd& action) {
  constexpr double dt = 0.05, g = 10.0, m = 1.0, l = 1.0, max_speed = 8.0;
  const double a = clip_action(action, spec_)(0);

  const double th = wrap_angle(theta_);
  const double reward =
      -(th * th + 0.1 * theta_dot_ * theta_dot_ + 0.001 * a * a);

  double new_dot =
      theta_dot_ + (3.0 * g / (2.0 * l) * std::sin(theta_) +
                    3.0 / (m * l * l) * a) *
                       dt;
  new_dot = std::clamp(new_dot, -max_speed, max_speed);
  theta_ += new_dot * dt;
  theta_dot_ = new_dot;
  ++steps_;
  return {observe(), reward, steps_ >= spec_.max_episode_steps};
}

void Pendulum::set_state(double theta, double theta_dot) {
  theta_ = theta;
  theta_dot_ = theta_dot;
  steps_ = 0;
}

std::unique_ptr<Env> Pendulum::clone() const {
  return std::make_unique<Pendulum>();
}

std::vector<RbfBump> default_deceptive_bumps() {
  // Broad global optimum at -2.5, narrow local one beside the start
  // region at +0.4.
  return {{-2.5, 1.0, 1.1}, {0.4, 0.75, 0.25}};
}

std::unique_ptr<Env> make_env(const std::string& name,
                              const std::vector<RbfBump>& bumps,
                              double slope) {
  if (name == "rbf_bandit") return std::make_unique<RbfBandit>(bumps, slope);
  if (name == "quadratic_bandit") return std::make_unique<QuadraticBandit>();
  if (name == "pendulum") return std::make_unique<Pendulum>();
  throw std::invalid_argument("unknown env: " + name);
}

}  // namespace oac
