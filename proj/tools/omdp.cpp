#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <omp.h>

#include "omdp/cli.hpp"
#include "omdp/config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Online MDP learner with adversarial transitions"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_dir;
  int workers = 0;
  std::vector<std::string> model_files;
  app.add_option("--workers", workers, "OpenMP threads (default: OMDP_WORKERS or all cores)")
      ->check(CLI::PositiveNumber);

  const std::vector<std::pair<const char*, const char*>> commands{
      {"run", "Play one game and write trace.csv and summary.csv"},
      {"sweep", "Monte Carlo regret over horizons and seeds; writes sweep.csv"},
      {"experts-bench", "Shrinking Dartboard against exponential weights on an expert stream"},
      {"mixing-check", "Certify or refute uniform mixing of a set of models"},
      {"cover", "Build the grid cover of stochastic policies; writes cover.txt"},
  };
  std::vector<CLI::App*> subs;
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    const bool needs_config = std::string(name) != "mixing-check";
    auto* opt = sub->add_option("--config,-c", config_path, "YAML experiment config");
    if (needs_config) {
      opt->required()->check(CLI::ExistingFile);
    } else {
      opt->check(CLI::ExistingFile);
      sub->add_option("models", model_files, "Model files")->check(CLI::ExistingFile);
    }
    sub->add_option("--out,-o", output_dir, "Output directory (overrides config)");
    subs.push_back(sub);
  }

  CLI11_PARSE(app, argc, argv);

  if (workers == 0) workers = omdp::workers_from_environment();
  if (workers > 0) omp_set_num_threads(workers);

  std::optional<omdp::Command> command;
  for (auto* sub : subs) {
    if (sub->parsed()) command = omdp::parse_command(sub->get_name());
  }

  omdp::ExperimentConfig config;
  try {
    if (!config_path.empty()) config = omdp::load_config(config_path);
  } catch (const omdp::ConfigError& e) {
    for (const auto& issue : e.issues()) {
      std::cerr << config_path << ':' << issue.line << ": " << issue.field << ": " << issue.message
                << '\n';
    }
    return omdp::kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return omdp::kExitError;
  }
  if (*command == omdp::Command::mixing_check && config_path.empty() && model_files.empty()) {
    std::cerr << "mixing-check: give model files or --config\n";
    return omdp::kExitError;
  }

  omdp::ExecuteOptions options;
  options.output_dir = output_dir;
  options.model_files = model_files;
  return omdp::execute(config, *command, options, std::cout, std::cerr);
}
