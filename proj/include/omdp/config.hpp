#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "omdp/adversary.hpp"
#include "omdp/mdp_core.hpp"
#include "omdp/sd_mdp.hpp"

namespace omdp {

enum class PolicyClassSource { all_deterministic, file, cover };

std::string_view to_string(PolicyClassSource source);

/// Everything an experiment needs. Parsed from YAML:
///
///   shape:     {states: 4, actions: 2}
///   adversary: {kind: model-switching, seed: 7, period: 500,
///               models_file: m.txt, losses_file: l.txt}   # files: scripted only
///   learner:   {algorithm: sd-mdp, policy_class: all-deterministic,
///               policy_file: p.txt, epsilon: 0.2}
///   horizons:  [5000, 10000]
///   seeds:     [1, 2, 3]            # or {first: 1, count: 100}
///   gamma:     0.25
///   x0:        0
///   output:    results
///   allow_unmixed: false
///   trace:     {record_costs: false, sampled_comparator: false}
///   experts:   {count: 8, stream: random, seed: 0, gap: 0.1, phase_length: 1}
///   mixing:    {model_files: [a.txt], samples: 10000}
///   cover:     {epsilon: 0.2, cap: 1000000}
struct ExperimentConfig {
  ProblemShape shape{4, 2};

  AdversaryKind adversary_kind = AdversaryKind::fixed;
  std::uint64_t adversary_seed = 0;
  std::size_t period = kDefaultPeriod;
  std::string models_file;
  std::string losses_file;

  UpdateRule learner = UpdateRule::shrinking_dartboard;
  PolicyClassSource policy_class = PolicyClassSource::all_deterministic;
  std::string policy_file;
  /// 0 selects 1/T for the first horizon.
  double class_epsilon = 0.0;

  std::vector<std::size_t> horizons{1000};
  std::vector<std::uint64_t> seeds{1};
  double gamma = kDefaultGamma;
  std::size_t x0 = 0;
  std::string output = ".";
  bool allow_unmixed = false;

  bool record_costs = false;
  bool sampled_comparator = false;

  std::size_t experts = 8;
  ExpertStreamKind expert_stream = ExpertStreamKind::random;
  std::uint64_t expert_seed = 0;
  double expert_gap = 0.1;
  std::size_t expert_phase_length = 1;

  std::vector<std::string> mixing_model_files;
  std::size_t mixing_samples = 10'000;

  double cover_epsilon = 0.2;
  std::size_t cover_cap = 1'000'000;

  /// Relative file names resolve against this; not part of the text form.
  std::filesystem::path base_directory;

  bool operator==(const ExperimentConfig&) const = default;

  std::filesystem::path resolve(const std::string& file) const;
};

struct ConfigIssue {
  std::size_t line = 0;  // 1-based, 0 when unknown
  std::string field;
  std::string message;
};

/// All problems found in a config, not just the first.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<ConfigIssue> issues);
  const std::vector<ConfigIssue>& issues() const { return issues_; }

 private:
  std::vector<ConfigIssue> issues_;
};

ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical YAML form; parse_config(to_text(c)) == c.
std::string to_text(const ExperimentConfig& config);

}  // namespace omdp
