#include "oac/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "oac/csv.hpp"
#include "oac/params_io.hpp"

namespace oac {

namespace fs = std::filesystem;

namespace {

std::string full_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}

}  // namespace

double final_smoothed_return(const TrainLog& log) {
  if (log.rows.empty())
    throw std::runtime_error(
        "no evaluation rows; increase total_env_steps or lower eval_interval");
  return log.rows.back().return_smooth;
}

TrainResult cmd_train(const RunConfig& cfg, const std::string& out_dir) {
  fs::create_directories(out_dir);
  auto env = make_env(cfg);
  TrainResult result = train(cfg.train, *env);
  write_metrics_csv((fs::path(out_dir) / "metrics.csv").string(),
                    result.log.rows);
  save_agent(result.agent, (fs::path(out_dir) / "params.bin").string(),
             (fs::path(out_dir) / "params.json").string());
  return result;
}

std::vector<SweepCell> cmd_sweep(const RunConfig& base, const std::string& key,
                                 const std::vector<double>& values,
                                 const std::vector<std::uint64_t>& seeds,
                                 const std::string& out_path) {
  double TrainConfig::* field = nullptr;
  if (key == "shift_multiplier") {
    field = &TrainConfig::shift_multiplier;
  } else if (key == "beta_ub") {
    field = &TrainConfig::beta_ub;
  } else if (key == "beta_lb") {
    field = &TrainConfig::beta_lb;
  } else if (key == "alpha") {
    field = &TrainConfig::alpha;
  } else {
    throw ConfigError("sweep: unknown key: " + key);
  }
  if (values.empty()) throw ConfigError("sweep: no values given");
  if (seeds.empty()) throw ConfigError("sweep: no seeds given");

  std::vector<SweepCell> cells;
  std::vector<double> agg_mean(values.size()), agg_ci(values.size());
  for (std::size_t vi = 0; vi < values.size(); ++vi) {
    double sum = 0.0;
    std::vector<double> finals;
    for (const std::uint64_t seed : seeds) {
      RunConfig cfg = base;
      cfg.train.*field = values[vi];
      cfg.train.seed = seed;
      auto env = make_env(cfg);
      const TrainResult result = train(cfg.train, *env);
      const double fin = final_smoothed_return(result.log);
      cells.push_back({values[vi], seed, fin});
      finals.push_back(fin);
      sum += fin;
    }
    const double n = static_cast<double>(finals.size());
    const double mean = sum / n;
    double sd = 0.0;
    if (finals.size() > 1) {
      double ss = 0.0;
      for (const double f : finals) ss += (f - mean) * (f - mean);
      sd = std::sqrt(ss / (n - 1.0));
    }
    agg_mean[vi] = mean;
    agg_ci[vi] = finals.size() > 1 ? 1.645 * sd / std::sqrt(n) : 0.0;
  }

  auto out = open_out(out_path);
  out << "value,seed,final_return_smooth,agg_mean,agg_ci90\n";
  for (const SweepCell& c : cells) {
    const std::size_t vi = static_cast<std::size_t>(
        std::find(values.begin(), values.end(), c.value) - values.begin());
    out << format_g6(c.value) << "," << c.seed << ","
        << format_g6(c.final_return_smooth) << "," << format_g6(agg_mean[vi])
        << "," << format_g6(agg_ci[vi]) << "\n";
  }
  return cells;
}

void cmd_slice(const Agent& agent, const RunConfig& cfg, const VectorXd& state,
               int n_rays, int points, double halfwidth, std::uint64_t seed,
               const std::string& out_path) {
  auto env = make_env(cfg);
  const EnvSpec& spec = env->spec();
  if (state.size() != spec.obs_dim)
    throw std::invalid_argument("slice: state dimension mismatch");
  if (points < 1) throw std::invalid_argument("slice: points must be >= 1");
  if (halfwidth <= 0.0)
    halfwidth = (spec.action_high - spec.action_low).norm();

  const VectorXd center = policy_params(agent.policy, state).mu;

  std::vector<VectorXd> dirs;
  if (spec.act_dim == 1) {
    dirs.push_back(VectorXd::Constant(1, 1.0));
    dirs.push_back(VectorXd::Constant(1, -1.0));
  } else {
    Rng rng(seed);
    for (int k = 0; k < n_rays; ++k) {
      VectorXd d(spec.act_dim);
      do {
        for (int i = 0; i < spec.act_dim; ++i) d(i) = rng.normal();
      } while (d.norm() < 1e-12);
      dirs.push_back(d / d.norm());
    }
  }

  auto out = open_out(out_path);
  out << "ray,offset,q_mean,q_ub,q_lb\n";
  for (std::size_t k = 0; k < dirs.size(); ++k) {
    const auto rows = critic_slice(
        agent.critic, state, center, dirs[k], halfwidth, points,
        cfg.train.beta_ub, cfg.train.beta_lb, spec.action_low,
        spec.action_high);
    for (const SliceRow& r : rows)
      out << k << "," << format_g6(r.offset) << "," << format_g6(r.mean) << ","
          << format_g6(r.ub) << "," << format_g6(r.lb) << "\n";
  }
}

std::vector<EpgRow> epg_recurrence(long long steps, double lr, double alpha,
                                   double mu0, double sigma0) {
  if (!(2.0 * lr < 1.0))
    throw std::invalid_argument("epg-demo: unstable lr, need 2*lr < 1");
  if (lr <= 0.0) throw std::invalid_argument("epg-demo: lr must be positive");
  if (alpha < 0.0) throw std::invalid_argument("epg-demo: alpha must be >= 0");
  if (sigma0 <= 0.0)
    throw std::invalid_argument("epg-demo: sigma0 must be positive");
  if (steps < 0) throw std::invalid_argument("epg-demo: steps must be >= 0");

  std::vector<EpgRow> rows;
  rows.reserve(static_cast<std::size_t>(steps) + 1);
  double mu = mu0, sigma = sigma0;
  rows.push_back({0, mu, sigma});
  for (long long k = 1; k <= steps; ++k) {
    mu = mu + lr * (-2.0 * mu);
    sigma = sigma + lr * (-2.0 * sigma + alpha / sigma);
    rows.push_back({k, mu, sigma});
  }
  return rows;
}

void cmd_epg_demo(long long steps, double lr, double alpha, double mu0,
                  double sigma0, const std::string& out_path) {
  const auto rows = epg_recurrence(steps, lr, alpha, mu0, sigma0);
  auto out = open_out(out_path);
  // Full precision: this file is compared against the closed-form
  // recurrences at 1e-12.
  out << "step,mu,sigma\n";
  for (const EpgRow& r : rows)
    out << r.step << "," << full_double(r.mu) << "," << full_double(r.sigma)
        << "\n";
}

void cmd_sample_efficiency(const std::vector<std::string>& metrics_paths,
                           const std::vector<double>& thresholds,
                           const std::string& out_path) {
  if (metrics_paths.empty())
    throw std::invalid_argument("sample-efficiency: no metrics files");
  std::vector<std::vector<EvalRow>> runs;
  for (const auto& p : metrics_paths) runs.push_back(read_metrics_csv(p));

  auto out = open_out(out_path);
  out << "threshold,run,steps_to_reach\n";
  for (const double th : thresholds) {
    for (std::size_t r = 0; r < runs.size(); ++r) {
      long long reached = -1;
      for (const EvalRow& row : runs[r]) {
        if (row.return_smooth >= th) {
          reached = row.env_step;
          break;
        }
      }
      out << format_g6(th) << "," << r << ",";
      if (reached >= 0) {
        out << reached;
      } else {
        out << "never";
      }
      out << "\n";
    }
  }
}

void cmd_plot(const std::vector<std::string>& metrics_paths,
              const std::string& out_path) {
  if (metrics_paths.empty()) throw std::invalid_argument("plot: no inputs");
  std::vector<std::vector<EvalRow>> runs;
  for (const auto& p : metrics_paths) {
    runs.push_back(read_metrics_csv(p));
    if (runs.back().empty())
      throw std::runtime_error("plot: empty metrics file: " + p);
  }

  // Aggregate on the env_step grid of the first run, keeping steps every
  // run evaluated.
  auto out = open_out(out_path);
  out << "# learning curve aggregate over " << runs.size() << " run(s)\n";
  out << "# env_step mean lo hi  (lo/hi = mean -+ 1 std of return_smooth)\n";
  for (const EvalRow& lead : runs[0]) {
    std::vector<double> vals;
    for (const auto& run : runs) {
      for (const EvalRow& row : run) {
        if (row.env_step == lead.env_step) {
          vals.push_back(row.return_smooth);
          break;
        }
      }
    }
    if (vals.size() != runs.size()) continue;
    double mean = 0.0;
    for (const double v : vals) mean += v;
    mean /= static_cast<double>(vals.size());
    double sd = 0.0;
    if (vals.size() > 1) {
      double ss = 0.0;
      for (const double v : vals) ss += (v - mean) * (v - mean);
      sd = std::sqrt(ss / static_cast<double>(vals.size() - 1));
    }
    out << lead.env_step << " " << format_g6(mean) << " "
        << format_g6(mean - sd) << " " << format_g6(mean + sd) << "\n";
  }
}

}  // namespace oac
