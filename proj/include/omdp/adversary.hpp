#pragma once

// Oblivious adversaries. Everything emitted at round t is a pure function of
// the script and t; no entry point accepts learner history.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "omdp/mdp_core.hpp"

namespace omdp {

enum class AdversaryKind {
  fixed,             // one smoothed model and one loss for every round
  model_switching,   // two smoothed models (and losses) alternating every `period` rounds
  random_smoothed,   // fresh smoothed model and loss each round
  leader_punisher,   // losses load onto the script's own best-in-hindsight policy
  sinusoidal_loss,   // fixed model, losses oscillating with per-entry phases
  scripted,          // models/losses supplied explicitly, cycled; not smoothed
};

std::string_view to_string(AdversaryKind kind);
std::optional<AdversaryKind> parse_adversary_kind(std::string_view name);

inline constexpr double kDefaultGamma = 0.25;
inline constexpr std::size_t kDefaultPeriod = 500;

struct AdversaryScript {
  AdversaryKind kind = AdversaryKind::fixed;
  ProblemShape shape;
  std::uint64_t seed = 0;
  double gamma = kDefaultGamma;
  std::size_t period = kDefaultPeriod;
  /// Rounds 1..horizon are valid for emit.
  std::size_t horizon = 10'000'000;
  /// leader_punisher: start state of the script's own simulated comparators.
  std::size_t x0 = 0;
  /// scripted: explicit sequences, cycled by round.
  std::shared_ptr<const std::vector<TransitionModel>> scripted_models;
  std::shared_ptr<const std::vector<LossFunction>> scripted_losses;

  /// Short human-readable descriptor for traces.
  std::string describe() const;
  void validate() const;
};

struct RoundData {
  TransitionModel model;
  LossFunction loss;
};

/// (m_t, l_t) for 1 <= t <= script.horizon.
RoundData emit(const AdversaryScript& script, std::size_t t);

/// Materialized (m_t, l_t), t = 1..T.
class AdversarySequence {
 public:
  AdversarySequence() = default;
  AdversarySequence(ProblemShape shape, std::vector<TransitionModel> models,
                    std::vector<LossFunction> losses);

  std::size_t horizon() const { return models_.size(); }
  const ProblemShape& shape() const { return shape_; }
  /// 1-based round index.
  const TransitionModel& model(std::size_t t) const { return models_[t - 1]; }
  const LossFunction& loss(std::size_t t) const { return losses_[t - 1]; }
  const std::vector<TransitionModel>& models() const { return models_; }
  const std::vector<LossFunction>& losses() const { return losses_; }

  /// First T rounds.
  AdversarySequence prefix(std::size_t T) const;

 private:
  ProblemShape shape_;
  std::vector<TransitionModel> models_;
  std::vector<LossFunction> losses_;
};

inline constexpr std::size_t kDefaultSequenceMemoryCap = std::size_t{1} << 30;

/// Throws std::length_error when the sequence would exceed memory_cap bytes.
AdversarySequence precompute(const AdversaryScript& script, std::size_t T,
                             std::size_t memory_cap = kDefaultSequenceMemoryCap);

std::size_t sequence_bytes(const ProblemShape& shape, std::size_t T);

/// Distinct models in a script's first T rounds (for certification).
std::vector<TransitionModel> distinct_models(const AdversarySequence& sequence);

// Loss streams for the plain experts problem.

enum class ExpertStreamKind {
  fixed_gap,               // one expert is better by `gap` in Bernoulli mean
  phase_shifted_punisher,  // the script's own leader takes loss 1 for a phase
  random,                  // i.i.d. uniform losses
};

std::string_view to_string(ExpertStreamKind kind);
std::optional<ExpertStreamKind> parse_expert_stream_kind(std::string_view name);

struct ExpertStreamScript {
  ExpertStreamKind kind = ExpertStreamKind::random;
  std::size_t num_experts = 2;
  std::uint64_t seed = 0;
  double gap = 0.1;
  std::size_t phase_length = 1;
};

/// T rows of N losses; row t-1 holds c_t.
std::vector<std::vector<double>> expert_losses(const ExpertStreamScript& script, std::size_t T);

}  // namespace omdp
