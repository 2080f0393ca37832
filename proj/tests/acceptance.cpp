// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <fmt/core.h>

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <chrono>
#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "omdp/adversary.hpp"
#include "omdp/cover.hpp"
#include "omdp/experts.hpp"
#include "omdp/harness.hpp"
#include "omdp/kernels.hpp"
#include "omdp/mixing.hpp"
#include "omdp/sd_mdp.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace omdp;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<std::uint64_t> seed_range(std::uint64_t first, std::size_t count) {
  std::vector<std::uint64_t> seeds(count);
  for (std::size_t i = 0; i < count; ++i) seeds[i] = first + i;
  return seeds;
}

oracle::Matrix random_table(std::size_t T, std::size_t n, RandomStream& rng) {
  oracle::Matrix m(T, std::vector<double>(n));
  for (auto& row : m)
    for (auto& v : row) v = rng.uniform();
  return m;
}

MixingCertificate certify_or_throw(const AdversarySequence& seq) {
  const auto models = distinct_models(seq);
  const auto verdict = certify_mixing(models, seq.shape());
  if (!is_certified(verdict)) throw std::runtime_error("adversary failed mixing certification");
  return std::get<MixingCertificate>(verdict);
}

Outcome mixing_contraction() {
  const auto start = Clock::now();
  const ProblemShape shape{4, 2};
  RandomStream rng(101);
  std::vector<TransitionModel> models;
  for (int i = 0; i < 100; ++i) models.push_back(smooth_model(random_model(shape, rng), 0.25));
  const auto verdict = certify_mixing(models, shape);
  if (!is_certified(verdict)) return {false, "smoothed models refuted"};
  const double delta = std::get<MixingCertificate>(verdict).delta_max;
  const double ratio = verify_contraction_empirically(models, shape, 10'000, rng);
  const double elapsed = seconds_since(start);
  const bool pass = delta <= 0.75 + 1e-12 && ratio <= delta + 1e-9 && elapsed < 10.0;
  return {pass, fmt::format("delta_max={:.6f} worst_ratio={:.6f} time={:.2f}s", delta, ratio,
                            elapsed)};
}

Outcome policy_perturbation() {
  const auto start = Clock::now();
  const ProblemShape shape{4, 3};
  RandomStream rng(202);
  std::size_t violations = 0;
  double worst = 0.0;
  std::vector<double> a(shape.num_states), b(shape.num_states);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto d = random_simplex_point(shape.num_states, rng);
    const auto p1 = random_policy(shape, rng), p2 = random_policy(shape, rng);
    const auto m = random_model(shape, rng);
    kernels::step_distribution(d, p1, m, a);
    kernels::step_distribution(d, p2, m, b);
    double lhs = 0.0;
    for (std::size_t x = 0; x < shape.num_states; ++x) lhs += std::abs(a[x] - b[x]);
    const double dist = policy_distance(p1, p2);
    worst = std::max(worst, lhs / dist);
    violations += lhs > dist + 1e-9;
  }
  const double elapsed = seconds_since(start);
  return {violations == 0 && elapsed < 5.0,
          fmt::format("violations={} worst_ratio={:.6f} time={:.2f}s", violations, worst, elapsed)};
}

Outcome dartboard_marginals() {
  RandomStream rng(303);
  double tree_err = 0.0;
  for (int table = 0; table < 20; ++table) {
    const std::size_t T = 1 + table % 4;
    const auto losses = random_table(T, 2, rng);
    const double eta = 0.05 + 0.45 * rng.uniform();
    const auto tree = oracle::dartboard_tree(losses, eta);
    ExpertState s(2, eta);
    for (std::size_t t = 0; t < T; ++t) {
      const auto q = s.distribution();
      for (std::size_t i = 0; i < 2; ++i) tree_err = std::max(tree_err, std::abs(q[i] - tree[t][i]));
      sd_update(s, losses[t]);
    }
  }

  // One test per round at level 0.001/T keeps the family level at 0.001.
  const std::size_t n = 4, T = 10, runs = 100'000;
  const auto losses = random_table(T, n, rng);
  const double eta = learning_rate(n, T);
  const auto expected = oracle::dartboard_marginals(losses, eta);
  std::vector<std::vector<double>> counts(T, std::vector<double>(n, 0.0));
  for (std::size_t r = 0; r < runs; ++r) {
    ExpertState s(n, eta);
    RandomStream run_rng(mix_seed(304, r));
    for (std::size_t t = 0; t < T; ++t) {
      counts[t][sd_choose(s, run_rng).expert] += 1.0;
      sd_update(s, losses[t]);
    }
  }
  const boost::math::chi_squared dist(static_cast<double>(n - 1));
  double min_p = 1.0;
  for (std::size_t t = 0; t < T; ++t) {
    double stat = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = expected[t][i] * runs;
      stat += (counts[t][i] - e) * (counts[t][i] - e) / e;
    }
    min_p = std::min(min_p, boost::math::cdf(boost::math::complement(dist, stat)));
  }
  const bool pass = tree_err <= 1e-12 && min_p * T >= 0.001;
  return {pass, fmt::format("tree_max_err={:.3g} chi2_min_p={:.4f} (rounds={})", tree_err, min_p, T)};
}

Outcome experts_regret() {
  const auto start = Clock::now();
  const std::size_t n = 8, T = 10'000, seeds = 200;
  const double eta = learning_rate(n, T);
  const double bound = sd_regret_bound(T, n);
  const double switch_target = std::sqrt(T * std::log(static_cast<double>(n)));
  bool pass = true;
  std::string detail;
  for (auto kind : {ExpertStreamKind::fixed_gap, ExpertStreamKind::phase_shifted_punisher,
                    ExpertStreamKind::random}) {
    const auto losses = expert_losses({kind, n, 404, 0.1, 50}, T);
    std::vector<double> best(n, 0.0);
    for (const auto& row : losses)
      for (std::size_t i = 0; i < n; ++i) best[i] += row[i];
    const double best_total = *std::min_element(best.begin(), best.end());
    std::vector<double> regrets, switches;
    double max_redraw = 0.0;
    for (std::size_t s = 0; s < seeds; ++s) {
      ExpertState state(n, eta);
      RandomStream rng(mix_seed(405, s));
      double suffered = 0.0;
      for (std::size_t t = 0; t < T; ++t) {
        max_redraw = std::max(max_redraw, state.redraw_probability());
        suffered += losses[t][sd_choose(state, rng).expert];
        sd_update(state, losses[t]);
      }
      regrets.push_back(suffered - best_total);
      switches.push_back(static_cast<double>(state.switch_count()));
    }
    const auto r = sample_stats(regrets), sw = sample_stats(switches);
    const bool ok = r.mean <= bound && max_redraw <= eta + 1e-12 &&
                    sw.mean <= switch_target + 3 * sw.standard_error;
    pass = pass && ok;
    detail += fmt::format("{}: regret={:.1f} switches={:.1f}+-{:.1f} max_redraw={:.6f}; ",
                          to_string(kind), r.mean, sw.mean, sw.standard_error, max_redraw);
  }
  const double elapsed = seconds_since(start);
  pass = pass && elapsed < 60.0;
  return {pass, detail + fmt::format("bound={:.1f} eta={:.6f} time={:.1f}s", bound, eta, elapsed)};
}

Outcome mdp_bound() {
  const auto start = Clock::now();
  const ProblemShape shape{4, 2};
  const std::size_t T = 20'000;
  MonteCarloSpec spec;
  spec.policies = std::make_shared<const std::vector<Policy>>(enumerate_deterministic_policies(shape));
  spec.shape = shape;
  spec.seeds = seed_range(1, 200);
  bool pass = true;
  std::string detail;
  for (auto kind : {AdversaryKind::model_switching, AdversaryKind::random_smoothed,
                    AdversaryKind::leader_punisher, AdversaryKind::sinusoidal_loss}) {
    AdversaryScript script;
    script.kind = kind;
    script.shape = shape;
    script.seed = 505;
    const auto seq = precompute(script, T);
    const auto cert = certify_or_throw(seq);
    spec.tau = cert.tau;
    const auto summary = monte_carlo(spec, seq);
    const bool ok = cert.tau <= 3.4761 && summary.mean_regret <= summary.bound_thm2 &&
                    summary.bound_thm2 <= static_cast<double>(T) &&
                    summary.max_decomposition_error <= 1e-9;
    pass = pass && ok;
    detail += fmt::format("{}: regret={:.1f} bound={:.1f} tau={:.4f}; ", to_string(kind),
                          summary.mean_regret, summary.bound_thm2, cert.tau);
  }
  const double elapsed = seconds_since(start);
  pass = pass && elapsed < 600.0;
  return {pass, detail + fmt::format("time={:.1f}s", elapsed)};
}

Outcome sublinear_growth() {
  const auto start = Clock::now();
  const ProblemShape shape{4, 2};
  MonteCarloSpec spec;
  spec.policies = std::make_shared<const std::vector<Policy>>(enumerate_deterministic_policies(shape));
  spec.shape = shape;
  spec.seeds = seed_range(1, 100);
  AdversaryScript script;
  script.kind = AdversaryKind::model_switching;
  script.shape = shape;
  script.seed = 606;
  const std::vector<std::size_t> horizons{5000, 10000, 20000, 40000};
  spec.tau = certify_or_throw(precompute(script, horizons.back())).tau;
  const auto summaries = sweep(spec, script, horizons);
  std::vector<double> xs, ys;
  std::string means;
  bool positive = true;
  for (const auto& s : summaries) {
    xs.push_back(static_cast<double>(s.horizon));
    ys.push_back(s.mean_regret);
    positive = positive && s.mean_regret > 0.0;
    means += fmt::format("{}:{:.1f} ", s.horizon, s.mean_regret);
  }
  if (!positive) return {false, "mean regret not positive: " + means};
  const double slope = loglog_slope(xs, ys);
  const double elapsed = seconds_since(start);
  return {slope <= 0.75 && elapsed < 1200.0,
          fmt::format("slope={:.3f} means=[{}] time={:.1f}s", slope, means, elapsed)};
}

Outcome counterfactual_exactness() {
  const std::size_t T = 200, runs = 10'000;
  const auto seq = fixture::two_state_sequence(T);
  RandomStream rng(707);
  std::vector<Policy> policies = enumerate_deterministic_policies(fixture::kTwoByTwo);
  policies.push_back(random_policy(fixture::kTwoByTwo, rng));
  policies.push_back(random_policy(fixture::kTwoByTwo, rng));
  const auto cmp = comparator_losses(policies, seq, 0);
  bool pass = true;
  double worst_z = 0.0;
  for (std::size_t i = 0; i < policies.size(); ++i) {
    std::vector<double> samples(runs);
    for (std::size_t r = 0; r < runs; ++r) {
      RandomStream run_rng(mix_seed(708 + i, r));
      samples[r] = sampled_policy_loss(policies[i], seq, 0, run_rng);
    }
    const auto stats = sample_stats(samples);
    const double z = std::abs(stats.mean - cmp.totals()[i]) / stats.standard_error;
    worst_z = std::max(worst_z, z);
    pass = pass && z <= 3.0;
  }
  return {pass, fmt::format("policies={} worst_z={:.3f}", policies.size(), worst_z)};
}

Outcome cover_regret() {
  const auto start = Clock::now();
  const ProblemShape shape{2, 2};
  const double epsilon = 0.2;
  const auto cover = build_cover(shape, epsilon);
  RandomStream rng(808);
  std::size_t failures = 0;
  for (int i = 0; i < 10'000; ++i) {
    const auto pi = random_policy(shape, rng);
    failures += policy_distance(pi, cover.policies[nearest_cover_index(cover, pi)]) > epsilon + 1e-12;
  }

  const std::size_t T = 10'000;
  AdversaryScript script;
  script.kind = AdversaryKind::model_switching;
  script.shape = shape;
  script.seed = 809;
  const auto seq = precompute(script, T);
  const auto cert = certify_or_throw(seq);
  std::vector<Policy> targets;
  std::vector<double> target_values;
  for (int i = 0; i < 50; ++i) {
    targets.push_back(random_policy(shape, rng));
    target_values.push_back(policy_value(targets.back(), seq, 0));
  }
  const auto policies = std::make_shared<const std::vector<Policy>>(cover.policies);
  const std::size_t seeds = 20;
  double mean_realized = 0.0;
  for (std::size_t s = 0; s < seeds; ++s) {
    SdMdpLearner learner(policies, shape, T, 0);
    RandomStream game_rng(mix_seed(810, s));
    mean_realized += run_game(learner, seq, game_rng).realized_total() / seeds;
  }
  const double best_target = *std::min_element(target_values.begin(), target_values.end());
  const double worst_regret = mean_realized - best_target;
  const double bound = cover_regret_bound(T, cover.policies.size(), cert.tau, epsilon);
  const double elapsed = seconds_since(start);
  const bool pass = cover.policies.size() == 441 && failures == 0 && worst_regret <= bound &&
                    elapsed < 600.0;
  return {pass, fmt::format("size={} failures={} regret_vs_best_target={:.1f} bound={:.1f} "
                            "tau={:.4f} time={:.1f}s",
                            cover.policies.size(), failures, worst_regret, bound, cert.tau,
                            elapsed)};
}

Outcome long_run_stability() {
  const std::size_t n = 8, T = 1'000'000;
  const double eta = learning_rate(n, T);
  const std::vector<double> ones(n, 1.0);
  ExpertState sd(n, eta), ewa(n, eta);
  RandomStream rng(909), ewa_rng(910);
  std::size_t switches = 0;
  bool invariants = true;
  for (std::size_t t = 0; t < T; ++t) {
    invariants = invariants && sd.redraw_probability() <= eta + 1e-12;
    const auto choice = sd_choose(sd, rng);
    switches += choice.switched;
    sd_update(sd, ones);
    ewa_choose(ewa, ewa_rng);
    ewa_update(ewa, ones);
  }
  const double expected_lw = static_cast<double>(T) * std::log1p(-eta);
  for (const auto* s : {&sd, &ewa}) {
    const auto lw = s->log_weights();
    for (double v : lw) invariants = invariants && std::isfinite(v) && v == lw[0];
    for (double q : s->distribution()) invariants = invariants && q == 1.0 / n;
  }
  invariants = invariants && std::abs(sd.log_weights()[0] - expected_lw) <= 1e-6 * std::abs(expected_lw);
  invariants = invariants && std::abs(ewa.log_weights()[0] + eta * T) <= 1e-6 * eta * T;
  invariants = invariants && switches == sd.switch_count() && sd.switch_count() <= sd.redraw_count();
  return {invariants, fmt::format("log_weight={:.6f} expected={:.6f} switches={}",
                                  sd.log_weights()[0], expected_lw, switches)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"mixing contraction", mixing_contraction},
      {"policy perturbation", policy_perturbation},
      {"dartboard marginals", dartboard_marginals},
      {"experts regret", experts_regret},
      {"mdp regret bound", mdp_bound},
      {"sublinear growth", sublinear_growth},
      {"counterfactual exactness", counterfactual_exactness},
      {"cover regret", cover_regret},
      {"long-run stability", long_run_stability},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, fmt::format("exception: {}", e.what())};
    }
    failed += !o.pass;
    fmt::print("{} {} {}: {}\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
