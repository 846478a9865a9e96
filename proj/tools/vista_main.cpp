// Command-line front end: synthesize, simulate, impute, evaluate, experiment,
// gridsearch and boxcox-scan.

#include <CLI11.hpp>

#include <cstring>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "vista/commands.hpp"
#include "vista/io.hpp"
#include "vista/run_config.hpp"

namespace {

using vista::RunConfig;

/// The config file is applied before parsing so command-line flags win.
std::optional<std::string> find_config(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--config") == 0 && i + 1 < argc) return argv[i + 1];
    if (std::strncmp(argv[i], "--config=", 9) == 0) return std::string(argv[i] + 9);
  }
  return std::nullopt;
}

void add_io(CLI::App* cmd, RunConfig& cfg, bool needs_input) {
  auto* in = cmd->add_option("--input", cfg.input, "Input video (.vmc)");
  if (needs_input && cfg.input.empty()) in->required();
  cmd->add_option("--output-dir", cfg.output_dir, "Output directory");
}

void add_model(CLI::App* cmd, RunConfig& cfg, std::string& model) {
  cmd->add_option("--model", model, "soft, ts, sh or full")
      ->check(CLI::IsMember({"soft", "ts", "sh", "full"}));
  cmd->add_option("--profile", cfg.profile, "Penalty preset")
      ->check(CLI::IsMember({"storm", "nonstorm", "sim-demo"}));
  cmd->add_option("--lambda1", cfg.lambda1, "Nuclear-norm penalty");
  cmd->add_option("--lambda2", cfg.lambda2, "Temporal smoothing penalty");
  cmd->add_option("--lambda3", cfg.lambda3, "Auxiliary penalty");
}

void add_solver(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--rank", cfg.rank, "Factor rank")->check(CLI::PositiveNumber);
  cmd->add_option("--max-iter", cfg.max_iter, "Maximum sweeps");
  cmd->add_option("--tol", cfg.tol, "Relative change tolerance")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--sh-lmax", cfg.sh_lmax, "Spherical harmonic degree")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--sh-v", cfg.sh_v, "Spherical harmonic ridge penalty")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--boxcox-lambda", cfg.boxcox_lambda, "Box-Cox exponent");
  cmd->add_option("--boxcox-offset", cfg.boxcox_offset, "Offset added before Box-Cox")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", cfg.seed, "Random seed");
}

void add_pattern(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--pattern", cfg.pattern,
                  "random, temporal, random-patch or temporal-patch");
  cmd->add_option("--fraction", cfg.fractions, "Missing fraction(s)")->delimiter(',');
  cmd->add_option("--patch-size", cfg.patch_sizes, "Patch width(s)")->delimiter(',');
  cmd->add_option("--shift", cfg.shift, "Columns or perimeter steps per frame");
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  std::string model;
  try {
    if (auto path = find_config(argc, argv)) {
      cfg.apply(vista::io::Manifest::read(*path));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  model = std::string(vista::to_string(cfg.model));

  CLI::App app{"Video imputation by penalized matrix completion"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "key=value settings file")
      ->configurable(false);

  auto* synthesize = app.add_subcommand("synthesize", "Write a smooth test video");
  synthesize->add_option("--output-dir", cfg.output_dir, "Output directory");
  synthesize->add_option("--rows", cfg.rows)->check(CLI::PositiveNumber);
  synthesize->add_option("--cols", cfg.cols)->check(CLI::PositiveNumber);
  synthesize->add_option("--frames", cfg.frames)->check(CLI::PositiveNumber);
  synthesize->add_option("--noise", cfg.noise, "Gaussian noise sd")
      ->check(CLI::NonNegativeNumber);
  synthesize->add_option("--seed", cfg.seed, "Random seed");

  auto* simulate = app.add_subcommand("simulate", "Impose a missingness pattern");
  add_io(simulate, cfg, true);
  add_pattern(simulate, cfg);
  simulate->add_option("--seed", cfg.seed, "Random seed");

  auto* impute = app.add_subcommand("impute", "Impute a masked video");
  add_io(impute, cfg, true);
  add_model(impute, cfg, model);
  add_solver(impute, cfg);
  impute->add_option("--auxiliary", cfg.auxiliary, "Auxiliary video (.vmc)");
  impute->add_option("--holdout", cfg.holdout, "Random holdout fraction")
      ->check(CLI::Range(0.0, 1.0));
  impute->add_flag("--keep-observed", cfg.keep_observed,
                   "Copy observed entries into the output");

  auto* evaluate = app.add_subcommand("evaluate", "Score imputations");
  evaluate->add_option("--truth", cfg.truth, "Complete video (.vmc)");
  evaluate->add_option("--eval-mask", cfg.eval_mask, "Mask of scored entries (.vmc)");
  evaluate->add_option("--result", cfg.results, "name=path, repeatable");
  evaluate->add_option("--output-dir", cfg.output_dir, "Output directory");
  evaluate->add_option("--pattern", cfg.pattern, "Pattern label for margins.csv");
  evaluate->add_option("--fraction", cfg.fractions, "Level label")->delimiter(',');
  evaluate->add_option("--patch-size", cfg.patch_sizes, "Level label")->delimiter(',');

  auto* experiment = app.add_subcommand("experiment", "Compare all models");
  add_io(experiment, cfg, true);
  add_model(experiment, cfg, model);
  add_solver(experiment, cfg);
  add_pattern(experiment, cfg);
  experiment->add_flag("--keep-observed", cfg.keep_observed,
                       "Copy observed entries into the output");

  auto* gridsearch = app.add_subcommand("gridsearch", "Select penalties on a holdout");
  add_io(gridsearch, cfg, true);
  add_solver(gridsearch, cfg);
  gridsearch->add_option("--holdout", cfg.holdout, "Holdout fraction (default 0.2)")
      ->check(CLI::Range(0.0, 1.0));
  gridsearch->add_option("--grid-lambda1", cfg.grid_lambda1)->delimiter(',');
  gridsearch->add_option("--grid-lambda2", cfg.grid_lambda2)->delimiter(',');
  gridsearch->add_option("--grid-lambda3", cfg.grid_lambda3)->delimiter(',');

  auto* scan = app.add_subcommand("boxcox-scan", "Box-Cox likelihood over exponents");
  add_io(scan, cfg, true);
  scan->add_option("--boxcox-offset", cfg.boxcox_offset, "Offset added before Box-Cox")
      ->check(CLI::PositiveNumber);

  for (auto* sub : app.get_subcommands({})) {
    sub->add_option("--config", config_path, "key=value settings file")->configurable(false);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    cfg.model = vista::parse_model(model);
    auto& log = std::cerr;
    if (*synthesize) vista::cli::cmd_synthesize(cfg, log);
    else if (*simulate) vista::cli::cmd_simulate(cfg, log);
    else if (*impute) vista::cli::cmd_impute(cfg, log);
    else if (*evaluate) vista::cli::cmd_evaluate(cfg, log);
    else if (*experiment) vista::cli::cmd_experiment(cfg, log);
    else if (*gridsearch) vista::cli::cmd_gridsearch(cfg, log);
    else if (*scan) vista::cli::cmd_boxcox_scan(cfg, log);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
