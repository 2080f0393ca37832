#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "omdp/adversary.hpp"
#include "omdp/config.hpp"
#include "omdp/harness.hpp"

namespace omdp {

enum class Command { run, sweep, experts_bench, mixing_check, cover };

std::optional<Command> parse_command(std::string_view name);

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitRefuted = 2;

struct ExecuteOptions {
  /// Overrides config.output when non-empty.
  std::filesystem::path output_dir;
  /// mixing-check: model files given on the command line.
  std::vector<std::string> model_files;
};

/// Runs one subcommand. Outputs are a deterministic function of the config.
/// Returns kExitRefuted when the models do not mix (unless allow_unmixed is
/// set for run/sweep) and kExitError on I/O or validation failures.
int execute(const ExperimentConfig& config, Command command, const ExecuteOptions& options,
            std::ostream& out, std::ostream& err);

/// Script described by the config's adversary section.
AdversaryScript make_script(const ExperimentConfig& config, std::size_t horizon);

/// Policy class selected by the config's learner section.
std::vector<Policy> make_policy_class(const ExperimentConfig& config, std::size_t horizon);

/// CSV number formatting: 12 significant digits.
std::string csv_number(double value);

void write_trace_csv(std::ostream& out, const GameTrace& trace, const ComparatorMatrix& comparators);
void write_costs_csv(std::ostream& out, const GameTrace& trace);
void write_sweep_csv(std::ostream& out, const std::vector<MonteCarloSummary>& rows);

/// Worker count from OMDP_WORKERS, or 0 when unset or invalid.
int workers_from_environment();

}  // namespace omdp
