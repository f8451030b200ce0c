#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "oac/env.hpp"
#include "oac/trainer.hpp"

namespace oac {

// Raised for any malformed or invalid run-config input; the CLI maps it
// to exit code 2. Messages carry 1-based line numbers where known.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Full experiment description: trainer scalars plus environment choice.
struct RunConfig {
  TrainConfig train;
  std::string env_name = "rbf_bandit";
  std::vector<RbfBump> bumps = default_deceptive_bumps();
  double slope = 0.0;
};

// Parses `key = value` lines; `#` starts a whole-line comment, blank
// lines are skipped, unknown keys are rejected.
RunConfig parse_config_text(const std::string& text,
                            const std::string& origin);
RunConfig parse_config_file(const std::string& path);

// Canonical text form; parse(serialize(cfg)) == cfg.
std::string serialize_config(const RunConfig& cfg);

std::unique_ptr<Env> make_env(const RunConfig& cfg);

}  // namespace oac
