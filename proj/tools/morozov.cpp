#include "morozov/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

constexpr int exit_config = 2;

morozov::ExperimentConfig load(const std::string& path, const std::optional<std::uint64_t>& seed,
                               const std::optional<std::size_t>& workers) {
  morozov::ExperimentConfig cfg = morozov::load_experiment_config(path);
  if (seed) cfg.seed = *seed;
  if (workers) cfg.workers = *workers;
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tikhonov regularization with joint discrepancy-based parameter and level choice"};
  app.require_subcommand(1);

  std::string config;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::string format = "csv";

  const auto add_common = [&](CLI::App* sub, bool outputs) {
    sub->add_option("config", config, "experiment configuration file")->required();
    if (!outputs) return;
    sub->add_option("--out", out_dir, "artifact directory (default: experiment.output)");
    sub->add_option("--seed", seed, "override experiment.seed");
    sub->add_option("--workers", workers, "override experiment.workers");
    sub->add_option("--format", format, "output format")->check(CLI::IsMember({"csv"}));
  };
  CLI::App* run = app.add_subcommand("run", "run the configured experiment");
  CLI::App* rates = app.add_subcommand("rates", "run a convergence-rate study");
  CLI::App* oracle = app.add_subcommand("oracle", "compare the minimizer with the closed form");
  CLI::App* validate = app.add_subcommand("validate", "parse and check a configuration");
  add_common(run, true);
  add_common(rates, true);
  add_common(oracle, true);
  add_common(validate, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : exit_config;
  }

  morozov::ExperimentConfig cfg;
  try {
    cfg = load(config, seed, workers);
  } catch (const morozov::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_config;
  }

  if (validate->parsed()) {
    std::cout << cfg.to_text();
    return 0;
  }
  if (rates->parsed()) cfg.kind = morozov::ExperimentKind::rate_study;
  if (oracle->parsed()) cfg.kind = morozov::ExperimentKind::linear_oracle;

  try {
    return morozov::run_experiment_to(cfg, out_dir.empty() ? cfg.output : out_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
