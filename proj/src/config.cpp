#include "omdp/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

namespace omdp {

std::string_view to_string(PolicyClassSource source) {
  switch (source) {
    case PolicyClassSource::all_deterministic: return "all-deterministic";
    case PolicyClassSource::file: return "file";
    case PolicyClassSource::cover: return "cover";
  }
  return "?";
}

std::filesystem::path ExperimentConfig::resolve(const std::string& file) const {
  std::filesystem::path p(file);
  if (p.is_absolute() || base_directory.empty()) return p;
  return base_directory / p;
}

namespace {

std::string summarize(const std::vector<ConfigIssue>& issues) {
  std::string out = "invalid config:";
  for (const auto& i : issues) {
    out += "\n  ";
    if (i.line > 0) out += fmt::format("line {}: ", i.line);
    if (!i.field.empty()) out += i.field + ": ";
    out += i.message;
  }
  return out;
}

// Reads fields from a YAML mapping, recording every problem instead of
// stopping at the first.
class Reader {
 public:
  explicit Reader(std::vector<ConfigIssue>& issues) : issues_(issues) {}

  void fail(const YAML::Node& node, const std::string& field, const std::string& message) {
    const std::size_t line = node && node.Mark().line >= 0 ? static_cast<std::size_t>(node.Mark().line) + 1 : 0;
    issues_.push_back({line, field, message});
  }

  void check_keys(const YAML::Node& map, const std::string& prefix,
                  std::initializer_list<std::string_view> known) {
    if (!map.IsMap()) {
      fail(map, prefix, "expected a mapping");
      return;
    }
    for (const auto& kv : map) {
      const auto key = kv.first.as<std::string>();
      if (std::find(known.begin(), known.end(), key) == known.end()) {
        fail(kv.first, prefix.empty() ? key : prefix + "." + key, "unknown field");
      }
    }
  }

  template <typename T>
  void scalar(const YAML::Node& map, const char* key, const std::string& field, T& out) {
    const auto node = map[key];
    if (!node) return;
    try {
      out = node.as<T>();
    } catch (const YAML::Exception&) {
      fail(node, field, fmt::format("cannot read '{}'", node.Scalar()));
    }
  }

  void count(const YAML::Node& map, const char* key, const std::string& field, std::size_t& out,
             bool allow_zero = false) {
    const auto node = map[key];
    if (!node) return;
    long long value = 0;
    try {
      value = node.as<long long>();
    } catch (const YAML::Exception&) {
      fail(node, field, fmt::format("expected an integer, got '{}'", node.Scalar()));
      return;
    }
    if (value < 0 || (!allow_zero && value == 0)) {
      fail(node, field, fmt::format("must be {}, got {}", allow_zero ? "non-negative" : "positive", value));
      return;
    }
    out = static_cast<std::size_t>(value);
  }

 private:
  std::vector<ConfigIssue>& issues_;
};

std::string format_double(double v) { return fmt::format("{}", v); }

}  // namespace

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : std::runtime_error(summarize(issues)), issues_(std::move(issues)) {}

ExperimentConfig parse_config(std::string_view text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw ConfigError({{static_cast<std::size_t>(e.mark.line) + 1, "", e.msg}});
  }
  ExperimentConfig c;
  std::vector<ConfigIssue> issues;
  Reader r(issues);
  if (root.IsNull()) return c;
  r.check_keys(root, "",
               {"shape", "adversary", "learner", "horizons", "seeds", "gamma", "x0", "output",
                "allow_unmixed", "trace", "experts", "mixing", "cover"});
  if (!root.IsMap()) throw ConfigError(std::move(issues));

  if (auto shape = root["shape"]) {
    r.check_keys(shape, "shape", {"states", "actions"});
    std::size_t states = c.shape.num_states, actions = c.shape.num_actions;
    r.count(shape, "states", "shape.states", states);
    r.count(shape, "actions", "shape.actions", actions);
    if (states > 0 && actions > 0) c.shape = ProblemShape(states, actions);
  }

  if (auto adv = root["adversary"]) {
    r.check_keys(adv, "adversary", {"kind", "seed", "period", "models_file", "losses_file"});
    if (auto kind = adv["kind"]) {
      const auto name = kind.as<std::string>();
      if (auto parsed = parse_adversary_kind(name)) {
        c.adversary_kind = *parsed;
      } else {
        r.fail(kind, "adversary.kind", fmt::format("unknown adversary '{}'", name));
      }
    }
    r.scalar(adv, "seed", "adversary.seed", c.adversary_seed);
    r.count(adv, "period", "adversary.period", c.period);
    r.scalar(adv, "models_file", "adversary.models_file", c.models_file);
    r.scalar(adv, "losses_file", "adversary.losses_file", c.losses_file);
    if (c.adversary_kind == AdversaryKind::scripted && (c.models_file.empty() || c.losses_file.empty())) {
      r.fail(adv, "adversary", "scripted adversary needs models_file and losses_file");
    }
  }

  if (auto learner = root["learner"]) {
    r.check_keys(learner, "learner", {"algorithm", "policy_class", "policy_file", "epsilon"});
    if (auto alg = learner["algorithm"]) {
      const auto name = alg.as<std::string>();
      if (auto parsed = parse_update_rule(name)) {
        c.learner = *parsed;
      } else {
        r.fail(alg, "learner.algorithm", fmt::format("unknown learner '{}'", name));
      }
    }
    if (auto src = learner["policy_class"]) {
      const auto name = src.as<std::string>();
      if (name == "all-deterministic") c.policy_class = PolicyClassSource::all_deterministic;
      else if (name == "file") c.policy_class = PolicyClassSource::file;
      else if (name == "cover") c.policy_class = PolicyClassSource::cover;
      else r.fail(src, "learner.policy_class", fmt::format("unknown policy class '{}'", name));
    }
    r.scalar(learner, "policy_file", "learner.policy_file", c.policy_file);
    r.scalar(learner, "epsilon", "learner.epsilon", c.class_epsilon);
    if (c.policy_class == PolicyClassSource::file && c.policy_file.empty()) {
      r.fail(learner, "learner.policy_file", "required when policy_class is file");
    }
    if (c.class_epsilon < 0.0 || c.class_epsilon > 2.0) {
      r.fail(learner["epsilon"], "learner.epsilon", "must lie in (0, 2], or 0 for 1/T");
    }
  }

  if (auto horizons = root["horizons"]) {
    if (!horizons.IsSequence() || horizons.size() == 0) {
      r.fail(horizons, "horizons", "expected a non-empty list");
    } else {
      c.horizons.clear();
      for (std::size_t i = 0; i < horizons.size(); ++i) {
        long long v = 0;
        try {
          v = horizons[i].as<long long>();
        } catch (const YAML::Exception&) {
          r.fail(horizons[i], "horizons", fmt::format("expected an integer, got '{}'", horizons[i].Scalar()));
          continue;
        }
        if (v <= 0) {
          r.fail(horizons[i], "horizons", fmt::format("horizon must be positive, got {}", v));
          continue;
        }
        c.horizons.push_back(static_cast<std::size_t>(v));
      }
    }
  }

  if (auto seeds = root["seeds"]) {
    c.seeds.clear();
    if (seeds.IsSequence()) {
      for (std::size_t i = 0; i < seeds.size(); ++i) {
        try {
          c.seeds.push_back(seeds[i].as<std::uint64_t>());
        } catch (const YAML::Exception&) {
          r.fail(seeds[i], "seeds", fmt::format("expected a non-negative integer, got '{}'", seeds[i].Scalar()));
        }
      }
    } else if (seeds.IsMap()) {
      r.check_keys(seeds, "seeds", {"first", "count"});
      std::uint64_t first = 1;
      std::size_t n = 1;
      r.scalar(seeds, "first", "seeds.first", first);
      r.count(seeds, "count", "seeds.count", n);
      for (std::size_t i = 0; i < n; ++i) c.seeds.push_back(first + i);
    } else {
      r.fail(seeds, "seeds", "expected a list or {first, count}");
    }
    if (c.seeds.empty()) r.fail(seeds, "seeds", "at least one seed required");
    std::set<std::uint64_t> distinct(c.seeds.begin(), c.seeds.end());
    if (distinct.size() != c.seeds.size()) r.fail(seeds, "seeds", "seeds must be distinct");
  }

  r.scalar(root, "gamma", "gamma", c.gamma);
  if (!(c.gamma > 0.0 && c.gamma <= 1.0)) {
    r.fail(root["gamma"], "gamma", fmt::format("must lie in (0, 1], got {}", c.gamma));
  }
  r.count(root, "x0", "x0", c.x0, true);
  if (c.x0 >= c.shape.num_states) {
    r.fail(root["x0"], "x0", fmt::format("state {} out of range for {} states", c.x0, c.shape.num_states));
  }
  r.scalar(root, "output", "output", c.output);
  r.scalar(root, "allow_unmixed", "allow_unmixed", c.allow_unmixed);

  if (auto trace = root["trace"]) {
    r.check_keys(trace, "trace", {"record_costs", "sampled_comparator"});
    r.scalar(trace, "record_costs", "trace.record_costs", c.record_costs);
    r.scalar(trace, "sampled_comparator", "trace.sampled_comparator", c.sampled_comparator);
  }

  if (auto ex = root["experts"]) {
    r.check_keys(ex, "experts", {"count", "stream", "seed", "gap", "phase_length"});
    r.count(ex, "count", "experts.count", c.experts);
    if (auto stream = ex["stream"]) {
      const auto name = stream.as<std::string>();
      if (auto parsed = parse_expert_stream_kind(name)) {
        c.expert_stream = *parsed;
      } else {
        r.fail(stream, "experts.stream", fmt::format("unknown loss stream '{}'", name));
      }
    }
    r.scalar(ex, "seed", "experts.seed", c.expert_seed);
    r.scalar(ex, "gap", "experts.gap", c.expert_gap);
    if (!(c.expert_gap >= 0.0 && c.expert_gap <= 0.5)) {
      r.fail(ex["gap"], "experts.gap", "must lie in [0, 0.5]");
    }
    r.count(ex, "phase_length", "experts.phase_length", c.expert_phase_length);
  }

  if (auto mix = root["mixing"]) {
    r.check_keys(mix, "mixing", {"model_files", "samples"});
    if (auto files = mix["model_files"]) {
      if (!files.IsSequence()) {
        r.fail(files, "mixing.model_files", "expected a list of paths");
      } else {
        for (const auto& f : files) c.mixing_model_files.push_back(f.as<std::string>());
      }
    }
    r.count(mix, "samples", "mixing.samples", c.mixing_samples, true);
  }

  if (auto cov = root["cover"]) {
    r.check_keys(cov, "cover", {"epsilon", "cap"});
    r.scalar(cov, "epsilon", "cover.epsilon", c.cover_epsilon);
    if (!(c.cover_epsilon > 0.0 && c.cover_epsilon <= 2.0)) {
      r.fail(cov["epsilon"], "cover.epsilon", "must lie in (0, 2]");
    }
    r.count(cov, "cap", "cover.cap", c.cover_cap);
  }

  if (!issues.empty()) throw ConfigError(std::move(issues));
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot open config '{}'", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  auto config = parse_config(ss.str());
  config.base_directory = path.parent_path();
  return config;
}

std::string to_text(const ExperimentConfig& c) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "shape" << YAML::Value << YAML::Flow << YAML::BeginMap
      << YAML::Key << "states" << YAML::Value << c.shape.num_states
      << YAML::Key << "actions" << YAML::Value << c.shape.num_actions << YAML::EndMap;

  out << YAML::Key << "adversary" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "kind" << YAML::Value << std::string(to_string(c.adversary_kind));
  out << YAML::Key << "seed" << YAML::Value << c.adversary_seed;
  out << YAML::Key << "period" << YAML::Value << c.period;
  if (!c.models_file.empty()) out << YAML::Key << "models_file" << YAML::Value << c.models_file;
  if (!c.losses_file.empty()) out << YAML::Key << "losses_file" << YAML::Value << c.losses_file;
  out << YAML::EndMap;

  out << YAML::Key << "learner" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "algorithm" << YAML::Value << std::string(to_string(c.learner));
  out << YAML::Key << "policy_class" << YAML::Value << std::string(to_string(c.policy_class));
  if (!c.policy_file.empty()) out << YAML::Key << "policy_file" << YAML::Value << c.policy_file;
  out << YAML::Key << "epsilon" << YAML::Value << format_double(c.class_epsilon);
  out << YAML::EndMap;

  out << YAML::Key << "horizons" << YAML::Value << YAML::Flow << c.horizons;
  out << YAML::Key << "seeds" << YAML::Value << YAML::Flow << c.seeds;
  out << YAML::Key << "gamma" << YAML::Value << format_double(c.gamma);
  out << YAML::Key << "x0" << YAML::Value << c.x0;
  out << YAML::Key << "output" << YAML::Value << c.output;
  out << YAML::Key << "allow_unmixed" << YAML::Value << c.allow_unmixed;

  out << YAML::Key << "trace" << YAML::Value << YAML::BeginMap
      << YAML::Key << "record_costs" << YAML::Value << c.record_costs
      << YAML::Key << "sampled_comparator" << YAML::Value << c.sampled_comparator << YAML::EndMap;

  out << YAML::Key << "experts" << YAML::Value << YAML::BeginMap
      << YAML::Key << "count" << YAML::Value << c.experts
      << YAML::Key << "stream" << YAML::Value << std::string(to_string(c.expert_stream))
      << YAML::Key << "seed" << YAML::Value << c.expert_seed
      << YAML::Key << "gap" << YAML::Value << format_double(c.expert_gap)
      << YAML::Key << "phase_length" << YAML::Value << c.expert_phase_length << YAML::EndMap;

  out << YAML::Key << "mixing" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "model_files" << YAML::Value << YAML::Flow << c.mixing_model_files;
  out << YAML::Key << "samples" << YAML::Value << c.mixing_samples << YAML::EndMap;

  out << YAML::Key << "cover" << YAML::Value << YAML::BeginMap
      << YAML::Key << "epsilon" << YAML::Value << format_double(c.cover_epsilon)
      << YAML::Key << "cap" << YAML::Value << c.cover_cap << YAML::EndMap;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace omdp
