// Experiment runner for the compressed kernelized importance sampling library.
//
// Subcommands: direct, indirect, localize, custom, sweep. Each run writes
// <out>.csv (one row per particle) and <out>.manifest (key=value). Exit
// codes: 0 success, 2 configuration error, 3 numerical degeneracy.
#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ckis/harness.hpp"

namespace {

struct CliOptions {
  ckis::RunConfig config;
  std::string config_file;
  double epsilon = -1.0;  // sentinel: not set
  double alpha = -1.0;
  std::string epsilon_units = "paper";
  std::string log_base = "e";
  // sweep only
  std::string sweep_param = "n";
  std::vector<double> sweep_values;
  int replicates = 1;
};

// Optional key=value file; explicit flags override file entries.
void apply_config_file(const std::string& path, CliOptions& opt, const CLI::App& cmd) {
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("--config", "cannot open " + path);
  std::string line;
  auto unset = [&](const std::string& flag) {
    const CLI::Option* o = cmd.get_option_no_throw(flag);
    return o == nullptr || o->count() == 0;
  };
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    if (key == "n" && unset("--n")) opt.config.n_particles = std::stol(value);
    else if (key == "epsilon" && unset("--epsilon")) opt.epsilon = std::stod(value);
    else if (key == "alpha" && unset("--alpha")) opt.alpha = std::stod(value);
    else if (key == "h" && unset("--h")) opt.config.bandwidth = std::stod(value);
    else if (key == "seed" && unset("--seed")) opt.config.seed = std::stoull(value);
    else if (key == "batch" && unset("--batch")) opt.config.batch = std::stoi(value);
    else if (key == "epsilon-units" && unset("--epsilon-units")) opt.epsilon_units = value;
    else if (key == "log-base" && unset("--log-base")) opt.log_base = value;
    else if (key == "out" && unset("--out")) opt.config.output_path = value;
    else if (key == "compare-uncompressed" && unset("--compare-uncompressed"))
      opt.config.compare_uncompressed = value == "1" || value == "true";
  }
}

void add_common_flags(CLI::App* cmd, CliOptions& opt) {
  cmd->set_help_flag("--help", "print help");
  cmd->add_option("--n", opt.config.n_particles, "number of particles");
  auto* eps = cmd->add_option("--epsilon", opt.epsilon, "constant compression budget");
  auto* alp = cmd->add_option("--alpha", opt.alpha, "geometric budget ratio in (0,1)");
  eps->excludes(alp);
  cmd->add_option("--h", opt.config.bandwidth, "kernel bandwidth");
  cmd->add_option("--seed", opt.config.seed, "RNG seed");
  cmd->add_option("--batch", opt.config.batch, "compression cadence (particles per compression)");
  cmd->add_flag("--compare-uncompressed", opt.config.compare_uncompressed,
                "run a paired uncompressed stream on the same draws");
  cmd->add_option("--epsilon-units", opt.epsilon_units,
                  "budget units: paper (density-kernel MMD) or rkhs (unit-peak MMD)")
      ->check(CLI::IsMember({"paper", "rkhs"}));
  cmd->add_option("--log-base", opt.log_base, "range model log base (localize)")
      ->check(CLI::IsMember({"e", "10"}));
  cmd->add_option("--out", opt.config.output_path, "output prefix (<out>.csv, <out>.manifest)");
  cmd->add_option("--config", opt.config_file, "key=value config file (flags override)");
}

int finish(CliOptions& opt, const CLI::App& cmd) {
  if (!opt.config_file.empty()) apply_config_file(opt.config_file, opt, cmd);
  if (opt.epsilon >= 0.0) opt.config.epsilon = opt.epsilon;
  if (opt.alpha >= 0.0) opt.config.alpha = opt.alpha;
  opt.config.epsilon_units =
      opt.epsilon_units == "paper" ? ckis::EpsilonUnits::Paper : ckis::EpsilonUnits::Rkhs;
  opt.config.log_base = opt.log_base == "e" ? ckis::LogBase::E : ckis::LogBase::Ten;
  return 0;
}

int run_one(CliOptions& opt) {
  ckis::RunResult result = ckis::run(opt.config);
  if (result.exit_code != 0) {
    std::cerr << "error: " << result.error_message << "\n";
    return result.exit_code;
  }
  std::printf("experiment=%s n=%ld final_estimate=%.10g", ckis::experiment_name(opt.config.experiment),
              opt.config.n_particles, result.final_estimate);
  if (result.final_estimate_uncompressed)
    std::printf(" uncompressed=%.10g", *result.final_estimate_uncompressed);
  std::printf(" model_order=%d reference=%.10g wall=%.2fs\n", result.final_model_order,
              result.reference_value, result.wall_seconds);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ckis: streaming importance sampling with kernel-embedding compression"};
  app.require_subcommand(1);

  CliOptions direct_opt, indirect_opt, localize_opt, custom_opt, sweep_opt;
  direct_opt.config.experiment = ckis::Experiment::Direct;
  direct_opt.config.bandwidth = 0.01;
  indirect_opt.config.experiment = ckis::Experiment::Indirect;
  indirect_opt.config.bandwidth = 0.012;
  localize_opt.config.experiment = ckis::Experiment::Localize;
  localize_opt.config.bandwidth = 0.0001;
  localize_opt.config.n_particles = 3000;
  custom_opt.config.experiment = ckis::Experiment::Custom;
  custom_opt.config.epsilon_units = ckis::EpsilonUnits::Rkhs;
  custom_opt.epsilon_units = "rkhs";

  CLI::App* direct = app.add_subcommand("direct", "direct importance sampling (known target)");
  add_common_flags(direct, direct_opt);

  CLI::App* indirect = app.add_subcommand("indirect", "Bayes posterior with uniform proposal");
  add_common_flags(indirect, indirect_opt);

  CLI::App* localize = app.add_subcommand("localize", "2-D source localization from ranges");
  add_common_flags(localize, localize_opt);
  localize->add_option("--coord", localize_opt.config.coordinate, "coordinate for phi (0 or 1)")
      ->check(CLI::Range(0, 1));

  CLI::App* custom = app.add_subcommand("custom", "scalar Gaussian target/proposal");
  add_common_flags(custom, custom_opt);
  custom->add_option("--target-mean", custom_opt.config.custom.target_mean);
  custom->add_option("--target-sd", custom_opt.config.custom.target_sd);
  custom->add_option("--proposal-mean", custom_opt.config.custom.proposal_mean);
  custom->add_option("--proposal-sd", custom_opt.config.custom.proposal_sd);
  custom->add_option("--phi", custom_opt.config.custom.phi, "test function: x, x2 or sin")
      ->check(CLI::IsMember({"x", "x2", "sin"}));

  CLI::App* sw = app.add_subcommand("sweep", "replicate grid over one parameter");
  add_common_flags(sw, sweep_opt);
  sw->add_option("--experiment", [&sweep_opt](const std::vector<std::string>& v) {
        const std::string& name = v.front();
        if (name == "direct") sweep_opt.config.experiment = ckis::Experiment::Direct;
        else if (name == "indirect") sweep_opt.config.experiment = ckis::Experiment::Indirect;
        else if (name == "localize") sweep_opt.config.experiment = ckis::Experiment::Localize;
        else if (name == "custom") sweep_opt.config.experiment = ckis::Experiment::Custom;
        else return false;
        return true;
      },
      "base experiment: direct, indirect, localize, custom")
      ->default_str("direct");
  sw->add_option("--param", sweep_opt.sweep_param, "grid parameter: n, epsilon, alpha or h")
      ->check(CLI::IsMember({"n", "epsilon", "alpha", "h"}));
  sw->add_option("--values", sweep_opt.sweep_values, "grid values")->required();
  sw->add_option("--replicates", sweep_opt.replicates, "seeds per grid point");

  CLI11_PARSE(app, argc, argv);

  try {
    if (direct->parsed()) { finish(direct_opt, *direct); return run_one(direct_opt); }
    if (indirect->parsed()) { finish(indirect_opt, *indirect); return run_one(indirect_opt); }
    if (localize->parsed()) { finish(localize_opt, *localize); return run_one(localize_opt); }
    if (custom->parsed()) { finish(custom_opt, *custom); return run_one(custom_opt); }
    if (sw->parsed()) {
      finish(sweep_opt, *sw);
      if (!sweep_opt.config.epsilon && !sweep_opt.config.alpha &&
          sweep_opt.sweep_param != "epsilon" && sweep_opt.sweep_param != "alpha")
        sweep_opt.config.epsilon = 0.0;
      std::vector<ckis::SweepPoint> points = ckis::sweep(
          sweep_opt.config, sweep_opt.sweep_param, sweep_opt.sweep_values, sweep_opt.replicates);
      const std::string path =
          sweep_opt.config.output_path.empty() ? "sweep" : sweep_opt.config.output_path;
      ckis::write_sweep_csv(points, path + ".csv");
      for (const auto& p : points)
        std::printf("%s=%g replicates=%d mean_abs_error=%.6g mse=%.6g mean_model_order=%.2f\n",
                    p.param.c_str(), p.value, p.replicates, p.mean_abs_error, p.mse,
                    p.mean_model_order);
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
