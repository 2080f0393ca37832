#include "omdp/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

#include "omdp/kernels.hpp"

namespace omdp {

double GameTrace::realized_total() const {
  double total = 0.0;
  for (const auto& r : rounds) total += r.loss;
  return total;
}

GameTrace run_game(SdMdpLearner& learner, const AdversarySequence& sequence, RandomStream& rng,
                   const GameOptions& options, std::string adversary_descriptor) {
  if (sequence.shape() != learner.shape()) {
    throw ShapeMismatch("run_game: adversary and learner shapes differ");
  }
  if (sequence.horizon() != learner.horizon()) {
    throw std::invalid_argument(fmt::format("run_game: adversary has {} rounds, learner expects {}",
                                            sequence.horizon(), learner.horizon()));
  }
  if (learner.expert_state().round() != 1) {
    throw std::logic_error("run_game: learner has already played");
  }
  const std::size_t T = sequence.horizon();
  const std::size_t n_policies = learner.policy_class().size();

  GameTrace trace;
  trace.seed = rng.seed();
  trace.adversary = std::move(adversary_descriptor);
  trace.num_policies = n_policies;
  trace.rounds.reserve(T);
  if (options.record_costs) trace.costs.reserve(T * n_policies);

  std::size_t state = learner.x0();
  for (std::size_t t = 1; t <= T; ++t) {
    const double redraw_p = learner.rule() == UpdateRule::shrinking_dartboard
                                ? learner.expert_state().redraw_probability()
                                : 1.0;
    const auto choice = learner.choose_policy(rng);
    const auto& model = sequence.model(t);
    const auto& loss = sequence.loss(t);
    const Policy& pi = learner.policy(choice.expert);
    const std::size_t action = sample_action(pi, state, rng);
    const double suffered = loss(state, action);
    const std::size_t next = sample_next_state(model, state, action, rng);
    const auto costs = learner.observe(model, loss);

    trace.rounds.push_back(RoundRecord{t, state, choice.expert, action, suffered, choice.switched,
                                       choice.redrawn, redraw_p, costs[choice.expert]});
    if (options.record_costs) trace.costs.insert(trace.costs.end(), costs.begin(), costs.end());
    state = next;
  }
  trace.switch_count = learner.expert_state().switch_count();
  return trace;
}

ComparatorMatrix::ComparatorMatrix(std::size_t num_policies, std::size_t horizon,
                                   std::vector<double> data)
    : num_policies_(num_policies), horizon_(horizon), data_(std::move(data)) {
  if (data_.size() != num_policies_ * horizon_) {
    throw ShapeMismatch("ComparatorMatrix: data size differs from |Pi| x T");
  }
  totals_.resize(num_policies_);
  for (std::size_t i = 0; i < num_policies_; ++i) {
    const auto r = row(i);
    totals_[i] = std::accumulate(r.begin(), r.end(), 0.0);
  }
  if (num_policies_ > 0) {
    best_ = static_cast<std::size_t>(std::min_element(totals_.begin(), totals_.end()) -
                                     totals_.begin());
  }
}

ComparatorMatrix comparator_losses(std::span<const Policy> policies,
                                   const AdversarySequence& sequence, std::size_t x0) {
  if (x0 >= sequence.shape().num_states) {
    throw std::out_of_range(fmt::format("comparator_losses: x0 = {} out of range", x0));
  }
  for (const auto& p : policies) {
    if (p.shape() != sequence.shape()) throw ShapeMismatch("comparator_losses: policy shape differs");
  }
  return ComparatorMatrix(policies.size(), sequence.horizon(),
                          kernels::comparator_losses_parallel(policies, sequence, x0));
}

double RegretReport::decomposition_error() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < regret.size(); ++i) {
    worst = std::max(worst, std::abs(regret[i] - (b_term + c_term[i])));
  }
  return worst;
}

double sd_regret_bound(std::size_t horizon, std::size_t num_experts) {
  const double log_n = std::log(static_cast<double>(num_experts));
  return 4.0 * std::sqrt(static_cast<double>(horizon) * log_n) + log_n;
}

double sd_mdp_regret_bound(std::size_t horizon, std::size_t class_size, double tau) {
  const double log_n = std::log(static_cast<double>(class_size));
  return (4.0 + 2.0 * tau * tau) * std::sqrt(static_cast<double>(horizon) * log_n) + log_n;
}

double cover_regret_bound(std::size_t horizon, std::size_t cover_size, double tau,
                          double epsilon) {
  return sd_mdp_regret_bound(horizon, cover_size, tau) +
         tau * static_cast<double>(horizon) * epsilon;
}

RegretReport regret_report(const GameTrace& trace, const ComparatorMatrix& comparators,
                           double tau) {
  const std::size_t T = trace.rounds.size();
  if (comparators.horizon() != T || comparators.num_policies() != trace.num_policies) {
    throw ShapeMismatch("regret_report: trace and comparator matrix disagree");
  }
  RegretReport report;
  report.realized_total = trace.realized_total();
  for (const auto& r : trace.rounds) report.chosen_expected_total += comparators(r.policy, r.t);
  report.comparator_totals = comparators.totals();
  report.best_index = comparators.best_index();
  report.b_term = report.realized_total - report.chosen_expected_total;
  report.regret.resize(trace.num_policies);
  report.c_term.resize(trace.num_policies);
  for (std::size_t i = 0; i < trace.num_policies; ++i) {
    report.regret[i] = report.realized_total - report.comparator_totals[i];
    report.c_term[i] = report.chosen_expected_total - report.comparator_totals[i];
  }
  report.switch_count = trace.switch_count;
  report.tau = tau;
  report.bound_thm1 = sd_regret_bound(T, trace.num_policies);
  report.bound_thm2 = sd_mdp_regret_bound(T, trace.num_policies, tau);
  return report;
}

RegretReport regret_report(const GameTrace& trace, const ComparatorMatrix& comparators,
                           const MixingCertificate& certificate) {
  return regret_report(trace, comparators, certificate.tau);
}

double sampled_policy_loss(const Policy& policy, const AdversarySequence& sequence, std::size_t x0,
                           RandomStream& rng) {
  std::size_t state = x0;
  double total = 0.0;
  for (std::size_t t = 1; t <= sequence.horizon(); ++t) {
    const std::size_t action = sample_action(policy, state, rng);
    total += sequence.loss(t)(state, action);
    state = sample_next_state(sequence.model(t), state, action, rng);
  }
  return total;
}

double policy_sequence_expected_loss(std::span<const Policy> policies,
                                     std::span<const std::size_t> sequence_indices,
                                     const AdversarySequence& sequence, std::size_t x0) {
  if (sequence_indices.size() != sequence.horizon()) {
    throw ShapeMismatch("policy_sequence_expected_loss: one policy index per round required");
  }
  const std::size_t n = sequence.shape().num_states;
  std::vector<double> dist(n, 0.0), next(n);
  dist.at(x0) = 1.0;
  double total = 0.0;
  for (std::size_t t = 1; t <= sequence.horizon(); ++t) {
    const Policy& pi = policies[sequence_indices[t - 1]];
    total += kernels::expected_loss(dist, pi, sequence.loss(t));
    kernels::step_distribution(dist, pi, sequence.model(t), next);
    dist.swap(next);
  }
  return total;
}

double simulate_policy_sequence(std::span<const Policy> policies,
                                std::span<const std::size_t> sequence_indices,
                                const AdversarySequence& sequence, std::size_t x0,
                                RandomStream& rng) {
  if (sequence_indices.size() != sequence.horizon()) {
    throw ShapeMismatch("simulate_policy_sequence: one policy index per round required");
  }
  std::size_t state = x0;
  double total = 0.0;
  for (std::size_t t = 1; t <= sequence.horizon(); ++t) {
    const Policy& pi = policies[sequence_indices[t - 1]];
    const std::size_t action = sample_action(pi, state, rng);
    total += sequence.loss(t)(state, action);
    state = sample_next_state(sequence.model(t), state, action, rng);
  }
  return total;
}

SampleStats sample_stats(std::span<const double> values) {
  SampleStats s;
  if (values.empty()) return s;
  const double n = static_cast<double>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() < 2) return s;
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.standard_error = std::sqrt(ss / (n - 1.0) / n);
  return s;
}

namespace {

SeedOutcome play_seed(const MonteCarloSpec& spec, const AdversarySequence& sequence,
                      const ComparatorMatrix& comparators, std::uint64_t seed) {
  SdMdpLearner learner(spec.policies, spec.shape, sequence.horizon(), spec.x0, spec.rule);
  RandomStream rng(seed);
  const auto trace = run_game(learner, sequence, rng);
  const auto report = regret_report(trace, comparators, spec.tau);
  SeedOutcome out;
  out.seed = seed;
  out.realized_total = report.realized_total;
  out.regret_vs_best = report.regret_vs_best();
  out.b_term = report.b_term;
  out.c_term_best = report.c_term[report.best_index];
  out.switches = report.switch_count;
  out.decomposition_error = report.decomposition_error();
  for (const auto& r : trace.rounds) {
    out.max_redraw_probability = std::max(out.max_redraw_probability, r.redraw_probability);
  }
  return out;
}

void check_spec(const MonteCarloSpec& spec) {
  if (spec.seeds.size() < 2) throw std::invalid_argument("monte_carlo: need at least two seeds");
  if (!spec.policies || spec.policies->empty()) {
    throw std::invalid_argument("monte_carlo: empty policy class");
  }
}

MonteCarloSummary summarize(const MonteCarloSpec& spec, const ComparatorMatrix& comparators,
                            std::vector<SeedOutcome> outcomes) {
  MonteCarloSummary s;
  s.horizon = comparators.horizon();
  s.num_seeds = outcomes.size();
  s.best_index = comparators.best_index();
  s.best_total = comparators.totals()[s.best_index];
  s.tau = spec.tau;
  s.bound_thm1 = sd_regret_bound(s.horizon, spec.policies->size());
  s.bound_thm2 = sd_mdp_regret_bound(s.horizon, spec.policies->size(), spec.tau);

  std::vector<double> realized, regret, b, c, switches;
  for (const auto& o : outcomes) {
    realized.push_back(o.realized_total);
    regret.push_back(o.regret_vs_best);
    b.push_back(o.b_term);
    c.push_back(o.c_term_best);
    switches.push_back(static_cast<double>(o.switches));
    s.max_decomposition_error = std::max(s.max_decomposition_error, o.decomposition_error);
  }
  const auto rs = sample_stats(realized);
  const auto gs = sample_stats(regret);
  const auto ss = sample_stats(switches);
  s.mean_realized = rs.mean;
  s.stderr_realized = rs.standard_error;
  s.mean_regret = gs.mean;
  s.stderr_regret = gs.standard_error;
  s.mean_b = sample_stats(b).mean;
  s.mean_c = sample_stats(c).mean;
  s.switches_mean = ss.mean;
  s.switches_stderr = ss.standard_error;
  s.outcomes = std::move(outcomes);
  return s;
}

}  // namespace

MonteCarloSummary monte_carlo(const MonteCarloSpec& spec, const AdversarySequence& sequence) {
  check_spec(spec);
  const auto comparators = comparator_losses(*spec.policies, sequence, spec.x0);
  std::vector<SeedOutcome> outcomes(spec.seeds.size());
  const auto count = static_cast<std::ptrdiff_t>(spec.seeds.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const auto u = static_cast<std::size_t>(i);
    outcomes[u] = play_seed(spec, sequence, comparators, spec.seeds[u]);
  }
  return summarize(spec, comparators, std::move(outcomes));
}

MonteCarloSummary monte_carlo_serial(const MonteCarloSpec& spec,
                                     const AdversarySequence& sequence) {
  check_spec(spec);
  const ComparatorMatrix comparators(
      spec.policies->size(), sequence.horizon(),
      kernels::comparator_losses_serial(*spec.policies, sequence, spec.x0));
  std::vector<SeedOutcome> outcomes;
  outcomes.reserve(spec.seeds.size());
  for (auto seed : spec.seeds) outcomes.push_back(play_seed(spec, sequence, comparators, seed));
  return summarize(spec, comparators, std::move(outcomes));
}

std::vector<MonteCarloSummary> sweep(const MonteCarloSpec& spec, const AdversaryScript& script,
                                     std::span<const std::size_t> horizons) {
  if (horizons.empty()) return {};
  const std::size_t longest = *std::max_element(horizons.begin(), horizons.end());
  const auto full = precompute(script, longest);
  std::vector<MonteCarloSummary> out;
  out.reserve(horizons.size());
  for (auto T : horizons) out.push_back(monte_carlo(spec, full.prefix(T)));
  return out;
}

double loglog_slope(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2) {
    throw std::invalid_argument("loglog_slope: need at least two paired points");
  }
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0 && ys[i] > 0.0)) {
      throw std::domain_error(fmt::format("loglog_slope: non-positive point ({}, {})", xs[i], ys[i]));
    }
    lx.push_back(std::log(xs[i]));
    ly.push_back(std::log(ys[i]));
  }
  const double n = static_cast<double>(lx.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace omdp
