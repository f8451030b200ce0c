#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "oac/commands.hpp"
#include "oac/config.hpp"
#include "oac/params_io.hpp"

namespace {

namespace fs = std::filesystem;

std::vector<double> parse_double_list(const std::string& s,
                                      const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string f;
  while (std::getline(ss, f, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(f, &used));
      if (used != f.size()) throw std::invalid_argument("");
    } catch (...) {
      throw oac::ConfigError(what + ": bad number '" + f + "'");
    }
  }
  return out;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& s) {
  std::vector<std::uint64_t> out;
  for (const double v : parse_double_list(s, "--seeds"))
    out.push_back(static_cast<std::uint64_t>(v));
  return out;
}

struct CommonOpts {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<long long> seed;
  std::optional<std::string> mode;
};

oac::RunConfig load_config(const CommonOpts& opts) {
  oac::RunConfig cfg = oac::parse_config_file(opts.config_path);
  if (opts.seed) cfg.train.seed = static_cast<std::uint64_t>(*opts.seed);
  if (opts.mode) cfg.train.mode = oac::mode_from_string(*opts.mode);
  return cfg;
}

void add_common(CLI::App* cmd, CommonOpts& opts, bool needs_config = true) {
  auto* c = cmd->add_option("--config", opts.config_path, "run config file");
  if (needs_config) c->required();
  cmd->add_option("--out", opts.out_dir, "output directory");
  cmd->add_option("--seed", opts.seed, "override the config seed");
  cmd->add_option("--mode", opts.mode,
                  "override the config mode "
                  "(oac|oac_det|sac_ablation|lb_shift_ablation)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimistic actor-critic experiments"};
  app.require_subcommand(1);

  CommonOpts train_opts;
  auto* train_cmd = app.add_subcommand("train", "train and write metrics");
  add_common(train_cmd, train_opts);

  CommonOpts sweep_opts;
  std::string sweep_key, sweep_values, sweep_seeds;
  auto* sweep_cmd =
      app.add_subcommand("sweep", "final return across a parameter sweep");
  add_common(sweep_cmd, sweep_opts);
  sweep_cmd->add_option("--key", sweep_key,
                        "shift_multiplier|beta_ub|beta_lb|alpha")
      ->required();
  sweep_cmd->add_option("--values", sweep_values, "comma-separated values")
      ->required();
  sweep_cmd->add_option("--seeds", sweep_seeds, "comma-separated seeds")
      ->required();

  CommonOpts slice_opts;
  std::string slice_params_dir, slice_state;
  int slice_rays = 4, slice_points = 41;
  double slice_halfwidth = 0.0;
  auto* slice_cmd =
      app.add_subcommand("slice", "critic bound slices along action rays");
  add_common(slice_cmd, slice_opts);
  slice_cmd
      ->add_option("--params", slice_params_dir,
                   "directory with params.bin and params.json")
      ->required();
  slice_cmd->add_option("--state", slice_state,
                        "comma-separated observation (default: env reset)");
  slice_cmd->add_option("--rays", slice_rays, "random ray count (dim > 1)");
  slice_cmd->add_option("--points", slice_points, "samples per ray");
  slice_cmd->add_option("--halfwidth", slice_halfwidth,
                        "ray half-length (default: action box diagonal)");

  std::string epg_out = ".";
  long long epg_steps = 200;
  double epg_lr = 0.1, epg_alpha = 0.0, epg_mu0 = 1.0, epg_sigma0 = 1.0;
  auto* epg_cmd = app.add_subcommand(
      "epg-demo", "variance collapse of exact policy gradient on -a^2");
  epg_cmd->add_option("--steps", epg_steps, "iterations");
  epg_cmd->add_option("--lr", epg_lr, "step size (2*lr < 1)");
  epg_cmd->add_option("--alpha", epg_alpha, "entropy coefficient");
  epg_cmd->add_option("--mu0", epg_mu0, "initial mean");
  epg_cmd->add_option("--sigma0", epg_sigma0, "initial std");
  epg_cmd->add_option("--out", epg_out, "output directory");

  std::vector<std::string> se_metrics;
  std::string se_thresholds, se_out = ".";
  auto* se_cmd = app.add_subcommand("sample-efficiency",
                                    "steps needed to reach return thresholds");
  se_cmd->add_option("--metrics", se_metrics, "metrics.csv files")->required();
  se_cmd->add_option("--thresholds", se_thresholds, "comma-separated returns")
      ->required();
  se_cmd->add_option("--out", se_out, "output directory");

  std::vector<std::string> plot_metrics;
  std::string plot_out = ".";
  auto* plot_cmd =
      app.add_subcommand("plot", "gnuplot-ready aggregate learning curve");
  plot_cmd->add_option("--metrics", plot_metrics, "metrics.csv files")
      ->required();
  plot_cmd->add_option("--out", plot_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*train_cmd) {
      oac::cmd_train(load_config(train_opts), train_opts.out_dir);
    } else if (*sweep_cmd) {
      fs::create_directories(sweep_opts.out_dir);
      oac::cmd_sweep(load_config(sweep_opts), sweep_key,
                     parse_double_list(sweep_values, "--values"),
                     parse_seed_list(sweep_seeds),
                     (fs::path(sweep_opts.out_dir) / "sweep.csv").string());
    } else if (*slice_cmd) {
      const oac::RunConfig cfg = load_config(slice_opts);
      const oac::Agent agent = oac::load_agent(
          (fs::path(slice_params_dir) / "params.bin").string(),
          (fs::path(slice_params_dir) / "params.json").string());
      auto env = oac::make_env(cfg);
      oac::VectorXd state;
      if (slice_state.empty()) {
        state = env->reset(cfg.train.seed);
      } else {
        const auto vals = parse_double_list(slice_state, "--state");
        state = Eigen::Map<const oac::VectorXd>(
            vals.data(), static_cast<Eigen::Index>(vals.size()));
      }
      fs::create_directories(slice_opts.out_dir);
      oac::cmd_slice(agent, cfg, state, slice_rays, slice_points,
                     slice_halfwidth, cfg.train.seed,
                     (fs::path(slice_opts.out_dir) / "slice.csv").string());
    } else if (*epg_cmd) {
      fs::create_directories(epg_out);
      oac::cmd_epg_demo(epg_steps, epg_lr, epg_alpha, epg_mu0, epg_sigma0,
                        (fs::path(epg_out) / "epg.csv").string());
    } else if (*se_cmd) {
      fs::create_directories(se_out);
      oac::cmd_sample_efficiency(
          se_metrics, parse_double_list(se_thresholds, "--thresholds"),
          (fs::path(se_out) / "sample_efficiency.csv").string());
    } else if (*plot_cmd) {
      fs::create_directories(plot_out);
      oac::cmd_plot(plot_metrics,
                    (fs::path(plot_out) / "plot.dat").string());
    }
  } catch (const oac::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
