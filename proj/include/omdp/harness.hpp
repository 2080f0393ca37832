#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "omdp/adversary.hpp"
#include "omdp/mdp_core.hpp"
#include "omdp/mixing.hpp"
#include "omdp/random.hpp"
#include "omdp/sd_mdp.hpp"

namespace omdp {

struct RoundRecord {
  std::size_t t = 0;
  std::size_t state = 0;
  std::size_t policy = 0;
  std::size_t action = 0;
  double loss = 0.0;
  bool switched = false;
  bool redrawn = false;
  /// 1 - beta_t before the stay decision.
  double redraw_probability = 0.0;
  /// c_t(pi_t)
  double chosen_cost = 0.0;
};

struct GameTrace {
  std::vector<RoundRecord> rounds;
  std::uint64_t seed = 0;
  std::string adversary;
  std::size_t num_policies = 0;
  /// Row t-1 is the full c_t vector; empty unless requested.
  std::vector<double> costs;
  std::size_t switch_count = 0;

  double realized_total() const;
};

struct GameOptions {
  bool record_costs = false;
};

/// Plays the online MDP game against a materialized oblivious adversary.
/// Per-round draw order: stay decision (rounds >= 2), redraw sample if any,
/// action, next state. The adversary must satisfy uniform mixing; checking
/// that is the caller's job (see certify_mixing).
GameTrace run_game(SdMdpLearner& learner, const AdversarySequence& sequence, RandomStream& rng,
                   const GameOptions& options = {}, std::string adversary_descriptor = {});

/// c_t(pi) for every policy in the class, independent of any learner.
class ComparatorMatrix {
 public:
  ComparatorMatrix(std::size_t num_policies, std::size_t horizon, std::vector<double> data);

  std::size_t num_policies() const { return num_policies_; }
  std::size_t horizon() const { return horizon_; }
  /// c_t(pi_i), t is 1-based.
  double operator()(std::size_t i, std::size_t t) const { return data_[i * horizon_ + t - 1]; }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(data_).subspan(i * horizon_, horizon_);
  }
  const std::vector<double>& totals() const { return totals_; }
  /// argmin of totals, ties to the lowest index.
  std::size_t best_index() const { return best_; }
  const std::vector<double>& data() const { return data_; }

 private:
  std::size_t num_policies_;
  std::size_t horizon_;
  std::vector<double> data_;
  std::vector<double> totals_;
  std::size_t best_ = 0;
};

ComparatorMatrix comparator_losses(std::span<const Policy> policies,
                                   const AdversarySequence& sequence, std::size_t x0);

struct RegretReport {
  double realized_total = 0.0;
  /// sum_t c_t(pi_t)
  double chosen_expected_total = 0.0;
  std::vector<double> comparator_totals;
  /// R_T(pi) = realized_total - sum_t c_t(pi)
  std::vector<double> regret;
  /// realized_total - sum_t c_t(pi_t)
  double b_term = 0.0;
  /// C_T(pi) = sum_t c_t(pi_t) - sum_t c_t(pi)
  std::vector<double> c_term;
  std::size_t best_index = 0;
  std::size_t switch_count = 0;
  double tau = 0.0;
  double bound_thm1 = 0.0;
  double bound_thm2 = 0.0;

  double regret_vs_best() const { return regret[best_index]; }
  /// max_pi |R_T(pi) - B_T - C_T(pi)|
  double decomposition_error() const;
};

/// 4 sqrt(T ln N) + ln N
double sd_regret_bound(std::size_t horizon, std::size_t num_experts);
/// (4 + 2 tau^2) sqrt(T ln |Pi|) + ln |Pi|
double sd_mdp_regret_bound(std::size_t horizon, std::size_t class_size, double tau);
/// SD-MDP bound on a cover plus tau T epsilon.
double cover_regret_bound(std::size_t horizon, std::size_t cover_size, double tau, double epsilon);

RegretReport regret_report(const GameTrace& trace, const ComparatorMatrix& comparators, double tau);
RegretReport regret_report(const GameTrace& trace, const ComparatorMatrix& comparators,
                           const MixingCertificate& certificate);

/// Pathwise sum_t l_t(x_t^pi, a_t) along one sampled trajectory of pi.
double sampled_policy_loss(const Policy& policy, const AdversarySequence& sequence, std::size_t x0,
                           RandomStream& rng);

/// Expected loss of following a given policy sequence (pi_1..pi_T) from x0,
/// propagating the learner's state law u_t exactly.
double policy_sequence_expected_loss(std::span<const Policy> policies,
                                     std::span<const std::size_t> sequence_indices,
                                     const AdversarySequence& sequence, std::size_t x0);

/// One sampled trajectory under a given policy sequence.
double simulate_policy_sequence(std::span<const Policy> policies,
                                std::span<const std::size_t> sequence_indices,
                                const AdversarySequence& sequence, std::size_t x0,
                                RandomStream& rng);

struct MonteCarloSpec {
  std::shared_ptr<const std::vector<Policy>> policies;
  ProblemShape shape;
  std::size_t x0 = 0;
  UpdateRule rule = UpdateRule::shrinking_dartboard;
  std::vector<std::uint64_t> seeds;
  double tau = 0.0;
};

struct SeedOutcome {
  std::uint64_t seed = 0;
  double realized_total = 0.0;
  double regret_vs_best = 0.0;
  double b_term = 0.0;
  double c_term_best = 0.0;
  std::size_t switches = 0;
  double max_redraw_probability = 0.0;
  double decomposition_error = 0.0;
};

struct MonteCarloSummary {
  std::size_t horizon = 0;
  std::size_t num_seeds = 0;
  std::size_t best_index = 0;
  double best_total = 0.0;
  double mean_realized = 0.0;
  double stderr_realized = 0.0;
  double mean_regret = 0.0;
  double stderr_regret = 0.0;
  double mean_b = 0.0;
  double mean_c = 0.0;
  double switches_mean = 0.0;
  double switches_stderr = 0.0;
  double tau = 0.0;
  double bound_thm1 = 0.0;
  double bound_thm2 = 0.0;
  double max_decomposition_error = 0.0;
  std::vector<SeedOutcome> outcomes;
};

/// Runs every seed against the same sequence; seeds fan out across OpenMP
/// threads. Needs at least two seeds.
MonteCarloSummary monte_carlo(const MonteCarloSpec& spec, const AdversarySequence& sequence);
/// Same computation on one thread; kept as the reference for tests.
MonteCarloSummary monte_carlo_serial(const MonteCarloSpec& spec, const AdversarySequence& sequence);

/// One summary per horizon, each against the script's first T rounds.
std::vector<MonteCarloSummary> sweep(const MonteCarloSpec& spec, const AdversaryScript& script,
                                     std::span<const std::size_t> horizons);

/// Least-squares slope of ln(y) on ln(x); all values must be positive.
double loglog_slope(std::span<const double> xs, std::span<const double> ys);

struct SampleStats {
  double mean = 0.0;
  double standard_error = 0.0;
};
SampleStats sample_stats(std::span<const double> values);

}  // namespace omdp
