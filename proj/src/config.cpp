#include "oac/config.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace oac {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string full_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

[[noreturn]] void fail(const std::string& origin, int line,
                       const std::string& msg) {
  throw ConfigError(origin + ":" + std::to_string(line) + ": " + msg);
}

double parse_double(const std::string& origin, int line,
                    const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument("");
    return x;
  } catch (...) {
    fail(origin, line, key + ": expected a number, got '" + v + "'");
  }
}

long long parse_int(const std::string& origin, int line,
                    const std::string& key, const std::string& v) {
  long long x = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size())
    fail(origin, line, key + ": expected an integer, got '" + v + "'");
  return x;
}

bool parse_bool(const std::string& origin, int line, const std::string& key,
                const std::string& v) {
  if (v == "on" || v == "true") return true;
  if (v == "off" || v == "false") return false;
  fail(origin, line, key + ": expected on/off, got '" + v + "'");
}

std::vector<RbfBump> parse_bumps(const std::string& origin, int line,
                                 const std::string& v) {
  std::vector<RbfBump> bumps;
  std::stringstream groups(v);
  std::string triple;
  while (std::getline(groups, triple, ';')) {
    triple = trim(triple);
    if (triple.empty()) continue;
    std::stringstream fields(triple);
    std::string f;
    std::vector<double> vals;
    while (std::getline(fields, f, ','))
      vals.push_back(parse_double(origin, line, "bumps", trim(f)));
    if (vals.size() != 3)
      fail(origin, line, "bumps: each bump needs c,h,w, got '" + triple + "'");
    if (vals[2] <= 0.0) fail(origin, line, "bumps: width must be positive");
    bumps.push_back({vals[0], vals[1], vals[2]});
  }
  return bumps;
}

}  // namespace

RunConfig parse_config_text(const std::string& text,
                            const std::string& origin) {
  RunConfig cfg;
  std::map<std::string, int> key_lines;

  std::stringstream stream(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(stream, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      fail(origin, line_no, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(origin, line_no, "missing key");
    key_lines[key] = line_no;

    TrainConfig& t = cfg.train;
    if (key == "gamma") {
      t.gamma = parse_double(origin, line_no, key, value);
    } else if (key == "tau") {
      t.tau = parse_double(origin, line_no, key, value);
    } else if (key == "alpha") {
      t.alpha = parse_double(origin, line_no, key, value);
    } else if (key == "lr") {
      t.lr = parse_double(origin, line_no, key, value);
    } else if (key == "batch") {
      t.batch = static_cast<int>(parse_int(origin, line_no, key, value));
    } else if (key == "buffer_capacity") {
      const long long c = parse_int(origin, line_no, key, value);
      if (c < 1) fail(origin, line_no, "buffer_capacity must be >= 1");
      t.buffer_capacity = static_cast<std::size_t>(c);
    } else if (key == "gradient_steps_per_env_step") {
      t.gradient_steps_per_env_step =
          static_cast<int>(parse_int(origin, line_no, key, value));
    } else if (key == "shift_multiplier") {
      t.shift_multiplier = parse_double(origin, line_no, key, value);
    } else if (key == "beta_ub") {
      t.beta_ub = parse_double(origin, line_no, key, value);
    } else if (key == "beta_lb") {
      t.beta_lb = parse_double(origin, line_no, key, value);
    } else if (key == "soft_target") {
      t.soft_target = parse_bool(origin, line_no, key, value);
    } else if (key == "initial_random_steps") {
      t.initial_random_steps = parse_int(origin, line_no, key, value);
    } else if (key == "total_env_steps") {
      t.total_env_steps = parse_int(origin, line_no, key, value);
    } else if (key == "eval_interval") {
      t.eval_interval = parse_int(origin, line_no, key, value);
    } else if (key == "eval_episodes") {
      t.eval_episodes =
          static_cast<int>(parse_int(origin, line_no, key, value));
    } else if (key == "seed") {
      t.seed =
          static_cast<std::uint64_t>(parse_int(origin, line_no, key, value));
    } else if (key == "mode") {
      try {
        t.mode = mode_from_string(value);
      } catch (const std::exception& e) {
        fail(origin, line_no, e.what());
      }
    } else if (key == "hidden_units") {
      t.hidden_units = static_cast<int>(parse_int(origin, line_no, key, value));
    } else if (key == "env") {
      if (value != "rbf_bandit" && value != "quadratic_bandit" &&
          value != "pendulum")
        fail(origin, line_no, "unknown env: " + value);
      cfg.env_name = value;
    } else if (key == "bumps") {
      cfg.bumps = parse_bumps(origin, line_no, value);
    } else if (key == "slope") {
      cfg.slope = parse_double(origin, line_no, key, value);
    } else {
      fail(origin, line_no, "unknown key: " + key);
    }
  }

  try {
    validate(cfg.train);
  } catch (const std::invalid_argument& e) {
    // Messages read "config: <key> ...": recover the key to report the
    // offending line when it was set explicitly.
    std::string msg = e.what();
    const std::string prefix = "config: ";
    std::string key;
    if (msg.rfind(prefix, 0) == 0) {
      const std::string rest = msg.substr(prefix.size());
      key = rest.substr(0, rest.find(' '));
    }
    const auto it = key_lines.find(key);
    if (it != key_lines.end()) fail(origin, it->second, msg);
    throw ConfigError(origin + ": " + msg);
  }
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

std::string serialize_config(const RunConfig& cfg) {
  const TrainConfig& t = cfg.train;
  std::ostringstream out;
  out << "env = " << cfg.env_name << "\n";
  if (cfg.env_name == "rbf_bandit") {
    out << "bumps = ";
    for (std::size_t i = 0; i < cfg.bumps.size(); ++i) {
      if (i) out << ";";
      out << full_double(cfg.bumps[i].center) << ","
          << full_double(cfg.bumps[i].height) << ","
          << full_double(cfg.bumps[i].width);
    }
    out << "\n";
    out << "slope = " << full_double(cfg.slope) << "\n";
  }
  out << "mode = " << to_string(t.mode) << "\n";
  out << "seed = " << t.seed << "\n";
  out << "gamma = " << full_double(t.gamma) << "\n";
  out << "tau = " << full_double(t.tau) << "\n";
  out << "alpha = " << full_double(t.alpha) << "\n";
  out << "lr = " << full_double(t.lr) << "\n";
  out << "batch = " << t.batch << "\n";
  out << "buffer_capacity = " << t.buffer_capacity << "\n";
  out << "gradient_steps_per_env_step = " << t.gradient_steps_per_env_step
      << "\n";
  out << "shift_multiplier = " << full_double(t.shift_multiplier) << "\n";
  out << "beta_ub = " << full_double(t.beta_ub) << "\n";
  out << "beta_lb = " << full_double(t.beta_lb) << "\n";
  out << "soft_target = " << (t.soft_target ? "on" : "off") << "\n";
  out << "initial_random_steps = " << t.initial_random_steps << "\n";
  out << "total_env_steps = " << t.total_env_steps << "\n";
  out << "eval_interval = " << t.eval_interval << "\n";
  out << "eval_episodes = " << t.eval_episodes << "\n";
  out << "hidden_units = " << t.hidden_units << "\n";
  return out.str();
}

std::unique_ptr<Env> make_env(const RunConfig& cfg) {
  return make_env(cfg.env_name, cfg.bumps, cfg.slope);
}

}  // namespace oac
