#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace oac {

using Eigen::VectorXd;

struct EnvSpec {
  int obs_dim = 0;
  int act_dim = 0;
  VectorXd action_low;
  VectorXd action_high;
  int max_episode_steps = 0;
  // Whether reaching the horizon ends the underlying MDP (bandits) or
  // merely truncates an ongoing task (pendulum). Drives the done flag
  // stored into replay.
  bool terminal_at_horizon = false;
};

struct StepResult {
  VectorXd obs;
  double reward = 0.0;
  bool done = false;
};

// Single-threaded episodic environment. reset(seed) is a deterministic
// function of the seed; step clips actions into the box before applying
// the dynamics and throws on non-finite actions.
class Env {
 public:
  virtual ~Env() = default;
  virtual const EnvSpec& spec() const = 0;
  virtual VectorXd reset(std::uint64_t seed) = 0;
  virtual StepResult step(const VectorXd& action) = 0;
  // Fresh instance with the same parameters, not the same episode state;
  // lets evaluation run without disturbing a training episode.
  virtual std::unique_ptr<Env> clone() const = 0;
};

struct RbfBump {
  double center = 0.0;
  double height = 0.0;
  double width = 1.0;
};

double rbf_reward(const std::vector<RbfBump>& bumps, double slope, double a);

// One-state, one-step bandit. reward(a) = sum_i h_i exp(-(a-c_i)^2/(2 w_i^2))
// + slope * a over the action box [-5, 5].
class RbfBandit : public Env {
 public:
  RbfBandit(std::vector<RbfBump> bumps, double slope);
  const EnvSpec& spec() const override { return spec_; }
  VectorXd reset(std::uint64_t seed) override;
  StepResult step(const VectorXd& action) override;
  std::unique_ptr<Env> clone() const override;

  const std::vector<RbfBump>& bumps() const { return bumps_; }
  double slope() const { return slope_; }

 private:
  EnvSpec spec_;
  std::vector<RbfBump> bumps_;
  double slope_;
  int steps_ = 0;
};

// reward(a) = -a^2, one step per episode.
class QuadraticBandit : public Env {
 public:
  QuadraticBandit();
  const EnvSpec& spec() const override { return spec_; }
  VectorXd reset(std::uint64_t seed) override;
  StepResult step(const VectorXd& action) override;
  std::unique_ptr<Env> clone() const override;

 private:
  EnvSpec spec_;
  int steps_ = 0;
};

// Torque-limited pendulum swing-up. Observation (cos th, sin th, thdot),
// reward -(wrap(th)^2 + 0.1 thdot^2 + 0.001 a^2) evaluated on the
// pre-step state, then
//   thdot <- clamp(thdot + (3g/(2l) sin th + 3/(m l^2) a) dt, +-8)
//   th    <- th + thdot_new dt
// with dt = 0.05, g = 10, m = l = 1, 200-step horizon.
class Pendulum : public Env {
 public:
  Pendulum();
  const EnvSpec& spec() const override { return spec_; }
  VectorXd reset(std::uint64_t seed) override;
  StepResult step(const VectorXd& action) override;
  std::unique_ptr<Env> clone() const override;

  // Wraps an angle into (-pi, pi].
  static double wrap_angle(double theta);

  // Places the pendulum at a chosen state; used by diagnostics and tests.
  void set_state(double theta, double theta_dot);

 private:
  VectorXd observe() const;
  EnvSpec spec_;
  double theta_ = 0.0;
  double theta_dot_ = 0.0;
  int steps_ = 0;
};

// Bump set whose reward has a broad global optimum away from the start
// region and a narrow spurious one next to it.
std::vector<RbfBump> default_deceptive_bumps();

std::unique_ptr<Env> make_env(const std::string& name,
                              const std::vector<RbfBump>& bumps,
                              double slope);

}  // namespace oac
