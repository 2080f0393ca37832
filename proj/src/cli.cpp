#include "omdp/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "omdp/cover.hpp"
#include "omdp/experts.hpp"
#include "omdp/mixing.hpp"
#include "omdp/text_format.hpp"

namespace omdp {

std::optional<Command> parse_command(std::string_view name) {
  if (name == "run") return Command::run;
  if (name == "sweep") return Command::sweep;
  if (name == "experts-bench") return Command::experts_bench;
  if (name == "mixing-check") return Command::mixing_check;
  if (name == "cover") return Command::cover;
  return std::nullopt;
}

std::string csv_number(double value) { return fmt::format("{:.12g}", value); }

int workers_from_environment() {
  const char* value = std::getenv("OMDP_WORKERS");
  if (value == nullptr) return 0;
  char* end = nullptr;
  const long n = std::strtol(value, &end, 10);
  if (end == value || *end != '\0' || n <= 0) return 0;
  return static_cast<int>(n);
}

AdversaryScript make_script(const ExperimentConfig& config, std::size_t horizon) {
  AdversaryScript script;
  script.kind = config.adversary_kind;
  script.shape = config.shape;
  script.seed = config.adversary_seed;
  script.gamma = config.gamma;
  script.period = config.period;
  script.horizon = horizon;
  script.x0 = config.x0;
  if (script.kind == AdversaryKind::scripted) {
    script.scripted_models = std::make_shared<const std::vector<TransitionModel>>(
        load_models(config.resolve(config.models_file)));
    script.scripted_losses = std::make_shared<const std::vector<LossFunction>>(
        load_losses(config.resolve(config.losses_file)));
  }
  script.validate();
  return script;
}

std::vector<Policy> make_policy_class(const ExperimentConfig& config, std::size_t horizon) {
  switch (config.policy_class) {
    case PolicyClassSource::all_deterministic:
      return enumerate_deterministic_policies(config.shape);
    case PolicyClassSource::file: {
      auto policies = load_policies(config.resolve(config.policy_file));
      if (policies.empty()) throw std::invalid_argument("policy file holds no policies");
      if (policies.front().shape() != config.shape) {
        throw ShapeMismatch("policy file shape differs from the configured shape");
      }
      return policies;
    }
    case PolicyClassSource::cover: {
      const double eps =
          config.class_epsilon > 0.0 ? config.class_epsilon : 1.0 / static_cast<double>(horizon);
      return build_cover(config.shape, eps, config.cover_cap).policies;
    }
  }
  return {};
}

void write_trace_csv(std::ostream& out, const GameTrace& trace, const ComparatorMatrix& comparators) {
  out << "t,state,policy,action,loss,switched,redraw_probability,chosen_cost,cumulative_loss,"
         "cumulative_regret\n";
  const std::size_t best = comparators.best_index();
  double cumulative = 0.0, best_cumulative = 0.0;
  for (const auto& r : trace.rounds) {
    cumulative += r.loss;
    best_cumulative += comparators(best, r.t);
    fmt::print(out, "{},{},{},{},{},{},{},{},{},{}\n", r.t, r.state, r.policy, r.action,
               csv_number(r.loss), r.switched ? 1 : 0, csv_number(r.redraw_probability),
               csv_number(r.chosen_cost), csv_number(cumulative),
               csv_number(cumulative - best_cumulative));
  }
}

void write_costs_csv(std::ostream& out, const GameTrace& trace) {
  out << "t";
  for (std::size_t i = 0; i < trace.num_policies; ++i) out << ",c" << i;
  out << '\n';
  for (std::size_t t = 0; t * trace.num_policies < trace.costs.size(); ++t) {
    out << t + 1;
    for (std::size_t i = 0; i < trace.num_policies; ++i) {
      out << ',' << csv_number(trace.costs[t * trace.num_policies + i]);
    }
    out << '\n';
  }
}

void write_sweep_csv(std::ostream& out, const std::vector<MonteCarloSummary>& rows) {
  out << "T,seeds,mean_regret,stderr,bound_thm2,switches_mean,tau\n";
  for (const auto& s : rows) {
    fmt::print(out, "{},{},{},{},{},{},{}\n", s.horizon, s.num_seeds, csv_number(s.mean_regret),
               csv_number(s.stderr_regret), csv_number(s.bound_thm2), csv_number(s.switches_mean),
               csv_number(s.tau));
  }
}

namespace {

std::ofstream open_output(const std::filesystem::path& dir, const char* name) {
  std::ofstream f(dir / name);
  if (!f) throw std::runtime_error(fmt::format("cannot write '{}'", (dir / name).string()));
  return f;
}

std::string action_list(const ProblemShape& shape, std::size_t policy_index) {
  const Policy pi = deterministic_policy_at(shape, policy_index);
  std::string out;
  for (std::size_t x = 0; x < shape.num_states; ++x) {
    for (std::size_t a = 0; a < shape.num_actions; ++a) {
      if (pi(x, a) == 1.0) out += fmt::format("{}{}", x == 0 ? "" : " ", a);
    }
  }
  return out;
}

void print_verdict(std::ostream& out, const MixingVerdict& verdict, const ProblemShape& shape) {
  std::visit(
      [&](const auto& v) {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, MixingCertificate>) {
          fmt::print(out, "certified: delta_max={} tau={} witness=(policy {} [{}], model {})\n",
                     csv_number(v.delta_max), csv_number(v.tau), v.witness.policy_index,
                     action_list(shape, v.witness.policy_index), v.witness.model_index);
        } else {
          fmt::print(out, "refuted: delta_max={} witness=(policy {} [{}], model {})\n",
                     csv_number(v.delta_max), v.witness.policy_index,
                     action_list(shape, v.witness.policy_index), v.witness.model_index);
        }
      },
      verdict);
}

// Certifies the distinct models of a sequence. Returns tau, or nullopt
// when refuted and not overridden (the refutation has been reported).
std::optional<double> mixing_gate(const ExperimentConfig& config, const AdversarySequence& seq,
                                  std::ostream& out, std::ostream& err) {
  const auto models = distinct_models(seq);
  const auto verdict = certify_mixing(models, config.shape);
  if (const auto* cert = std::get_if<MixingCertificate>(&verdict)) return cert->tau;
  print_verdict(err, verdict, config.shape);
  if (!config.allow_unmixed) {
    fmt::print(err, "uniform mixing fails for this adversary; set allow_unmixed to run anyway\n");
    return std::nullopt;
  }
  out << "warning: running without a mixing certificate; tau is undefined\n";
  return std::numeric_limits<double>::quiet_NaN();
}

int run_single(const ExperimentConfig& config, const std::filesystem::path& dir, std::ostream& out,
               std::ostream& err) {
  const std::size_t T = config.horizons.front();
  const std::uint64_t seed = config.seeds.front();
  const auto script = make_script(config, T);
  const auto seq = precompute(script, T);
  const auto tau = mixing_gate(config, seq, out, err);
  if (!tau) return kExitRefuted;

  auto policies = std::make_shared<const std::vector<Policy>>(make_policy_class(config, T));
  SdMdpLearner learner(policies, config.shape, T, config.x0, config.learner);
  RandomStream rng(seed);
  const auto trace = run_game(learner, seq, rng, {config.record_costs}, script.describe());
  const auto comparators = comparator_losses(*policies, seq, config.x0);
  const auto report = regret_report(trace, comparators, *tau);

  {
    auto f = open_output(dir, "trace.csv");
    write_trace_csv(f, trace, comparators);
  }
  if (config.record_costs) {
    auto f = open_output(dir, "costs.csv");
    write_costs_csv(f, trace);
  }
  auto f = open_output(dir, "summary.csv");
  f << "field,value\n";
  const auto row = [&](std::string_view key, const std::string& value) {
    fmt::print(f, "{},{}\n", key, value);
    fmt::print(out, "{} = {}\n", key, value);
  };
  row("adversary", script.describe());
  row("learner", std::string(to_string(config.learner)));
  row("seed", std::to_string(seed));
  row("T", std::to_string(T));
  row("policies", std::to_string(policies->size()));
  row("eta", csv_number(learner.eta()));
  row("realized_total", csv_number(report.realized_total));
  row("best_policy", std::to_string(report.best_index));
  row("best_total", csv_number(report.comparator_totals[report.best_index]));
  row("regret_vs_best", csv_number(report.regret_vs_best()));
  row("b_term", csv_number(report.b_term));
  row("c_term_best", csv_number(report.c_term[report.best_index]));
  row("switches", std::to_string(report.switch_count));
  row("tau", csv_number(report.tau));
  row("bound_thm1", csv_number(report.bound_thm1));
  row("bound_thm2", csv_number(report.bound_thm2));
  if (config.sampled_comparator) {
    RandomStream path_rng(mix_seed(seed, 0xC0));
    const double sampled =
        sampled_policy_loss((*policies)[report.best_index], seq, config.x0, path_rng);
    row("sampled_best_total", csv_number(sampled));
    row("sampled_regret_vs_best", csv_number(report.realized_total - sampled));
  }
  return kExitOk;
}

int run_sweep(const ExperimentConfig& config, const std::filesystem::path& dir, std::ostream& out,
              std::ostream& err) {
  if (config.seeds.size() < 2) {
    fmt::print(err, "sweep needs at least two seeds\n");
    return kExitError;
  }
  const std::size_t longest = *std::max_element(config.horizons.begin(), config.horizons.end());
  const auto script = make_script(config, longest);
  const auto full = precompute(script, longest);
  const auto tau = mixing_gate(config, full, out, err);
  if (!tau) return kExitRefuted;

  std::vector<MonteCarloSummary> rows;
  for (auto T : config.horizons) {
    MonteCarloSpec spec;
    spec.policies = std::make_shared<const std::vector<Policy>>(make_policy_class(config, T));
    spec.shape = config.shape;
    spec.x0 = config.x0;
    spec.rule = config.learner;
    spec.seeds = config.seeds;
    spec.tau = *tau;
    rows.push_back(monte_carlo(spec, full.prefix(T)));
    const auto& s = rows.back();
    fmt::print(out, "T={} mean_regret={} stderr={} bound_thm2={} switches_mean={}\n", s.horizon,
               csv_number(s.mean_regret), csv_number(s.stderr_regret), csv_number(s.bound_thm2),
               csv_number(s.switches_mean));
  }
  auto f = open_output(dir, "sweep.csv");
  write_sweep_csv(f, rows);
  return kExitOk;
}

struct BenchResult {
  double regret = 0.0;
  std::size_t switches = 0;
};

BenchResult bench_one(const std::vector<std::vector<double>>& losses, std::size_t n, double eta,
                      std::uint64_t seed, bool lazy, std::ostream& csv) {
  const std::size_t T = losses.size();
  const double bound = sd_regret_bound(T, n);
  ExpertState state(n, eta);
  RandomStream rng(seed);
  std::vector<double> cumulative(n, 0.0);
  double suffered = 0.0;
  csv << "round,chosen,switched,loss,cumulative_regret,bound\n";
  for (std::size_t t = 1; t <= T; ++t) {
    const auto choice = lazy ? sd_choose(state, rng) : ewa_choose(state, rng);
    const auto& c = losses[t - 1];
    suffered += c[choice.expert];
    for (std::size_t i = 0; i < n; ++i) cumulative[i] += c[i];
    if (lazy) {
      sd_update(state, c);
    } else {
      ewa_update(state, c);
    }
    const double best = *std::min_element(cumulative.begin(), cumulative.end());
    fmt::print(csv, "{},{},{},{},{},{}\n", t, choice.expert, choice.switched ? 1 : 0,
               csv_number(c[choice.expert]), csv_number(suffered - best), csv_number(bound));
  }
  return {suffered - *std::min_element(cumulative.begin(), cumulative.end()), state.switch_count()};
}

int run_experts_bench(const ExperimentConfig& config, const std::filesystem::path& dir,
                      std::ostream& out) {
  const std::size_t T = config.horizons.front();
  const std::uint64_t seed = config.seeds.front();
  ExpertStreamScript stream;
  stream.kind = config.expert_stream;
  stream.num_experts = config.experts;
  stream.seed = config.expert_seed;
  stream.gap = config.expert_gap;
  stream.phase_length = config.expert_phase_length;
  const auto losses = expert_losses(stream, T);
  const double eta = learning_rate(config.experts, T);

  auto sd_csv = open_output(dir, "experts_sd.csv");
  const auto sd = bench_one(losses, config.experts, eta, seed, true, sd_csv);
  auto ewa_csv = open_output(dir, "experts_ewa.csv");
  const auto ewa = bench_one(losses, config.experts, eta, seed, false, ewa_csv);
  fmt::print(out, "stream={} N={} T={} eta={} bound={}\n", to_string(stream.kind), config.experts,
             T, csv_number(eta), csv_number(sd_regret_bound(T, config.experts)));
  fmt::print(out, "sd: regret={} switches={}\n", csv_number(sd.regret), sd.switches);
  fmt::print(out, "ewa: regret={} switches={}\n", csv_number(ewa.regret), ewa.switches);
  return kExitOk;
}

int run_mixing_check(const ExperimentConfig& config, const ExecuteOptions& options,
                     std::ostream& out) {
  std::vector<TransitionModel> models;
  const auto& files = options.model_files.empty() ? config.mixing_model_files : options.model_files;
  if (!files.empty()) {
    for (const auto& file : files) {
      auto loaded = load_models(options.model_files.empty() ? config.resolve(file)
                                                            : std::filesystem::path(file));
      models.insert(models.end(), loaded.begin(), loaded.end());
    }
  } else {
    const std::size_t longest = *std::max_element(config.horizons.begin(), config.horizons.end());
    models = distinct_models(precompute(make_script(config, longest), longest));
  }
  if (models.empty()) throw std::invalid_argument("mixing-check: no models to check");
  const ProblemShape shape = models.front().shape();
  const auto verdict = certify_mixing(models, shape);
  fmt::print(out, "models={} states={} actions={}\n", models.size(), shape.num_states,
             shape.num_actions);
  print_verdict(out, verdict, shape);
  if (!is_certified(verdict)) return kExitRefuted;
  if (config.mixing_samples > 0) {
    RandomStream rng(config.seeds.front());
    const double ratio = verify_contraction_empirically(models, shape, config.mixing_samples, rng);
    fmt::print(out, "empirical_worst_ratio={} samples={}\n", csv_number(ratio), config.mixing_samples);
  }
  return kExitOk;
}

int run_cover(const ExperimentConfig& config, const std::filesystem::path& dir, std::ostream& out) {
  const auto cover = build_cover(config.shape, config.cover_epsilon, config.cover_cap);
  {
    auto f = open_output(dir, "cover.txt");
    for (const auto& p : cover.policies) write_policy(f, p);
  }
  fmt::print(out, "epsilon={} k={} size={} optimal_cover_bound={} bound_applies={} within_bound={}\n",
             csv_number(cover.epsilon), cover.resolution, cover.policies.size(),
             csv_number(cover.optimal_cover_bound), cover.bound_applies, cover.within_bound);
  return kExitOk;
}

}  // namespace

int execute(const ExperimentConfig& config, Command command, const ExecuteOptions& options,
            std::ostream& out, std::ostream& err) {
  try {
    const std::filesystem::path dir =
        options.output_dir.empty() ? config.resolve(config.output) : options.output_dir;
    if (command != Command::mixing_check) std::filesystem::create_directories(dir);
    switch (command) {
      case Command::run: return run_single(config, dir, out, err);
      case Command::sweep: return run_sweep(config, dir, out, err);
      case Command::experts_bench: return run_experts_bench(config, dir, out);
      case Command::mixing_check: return run_mixing_check(config, options, out);
      case Command::cover: return run_cover(config, dir, out);
    }
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitError;
  }
  return kExitError;
}

}  // namespace omdp
