#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string_view>
#include <optional>
#include <vector>

#include "omdp/experts.hpp"
#include "omdp/mdp_core.hpp"
#include "omdp/random.hpp"

namespace omdp {

enum class UpdateRule {
  shrinking_dartboard,  // SD-MDP
  exponential_weights,  // EWA over policies, the frequently-switching baseline
};

std::string_view to_string(UpdateRule rule);
std::optional<UpdateRule> parse_update_rule(std::string_view name);

/// Shrinking Dartboard over a finite policy class where each policy's loss is
/// its exact expected loss along its own counterfactual state law.
///
/// Per round: choose_policy(), then observe(m_t, l_t). observe evaluates
/// c_t(pi) on the pre-propagation laws d_{pi,t}, updates the weights, and
/// then advances every d_{pi,t} through P(pi, m_t).
class SdMdpLearner {
 public:
  SdMdpLearner(std::shared_ptr<const std::vector<Policy>> policy_class, ProblemShape shape,
               std::size_t horizon, std::size_t x0,
               UpdateRule rule = UpdateRule::shrinking_dartboard);
  SdMdpLearner(std::vector<Policy> policy_class, ProblemShape shape, std::size_t horizon,
               std::size_t x0, UpdateRule rule = UpdateRule::shrinking_dartboard);

  ExpertChoice choose_policy(RandomStream& rng);

  /// Returns c_t; valid until the next call.
  std::span<const double> observe(const TransitionModel& model, const LossFunction& loss);

  const std::vector<Policy>& policy_class() const { return *policies_; }
  const Policy& policy(std::size_t i) const { return (*policies_)[i]; }
  const ExpertState& expert_state() const { return experts_; }
  /// d_{pi,t} for the round about to be played.
  std::span<const double> policy_distribution(std::size_t i) const {
    return std::span<const double>(dists_).subspan(i * shape_.num_states, shape_.num_states);
  }
  const ProblemShape& shape() const { return shape_; }
  std::size_t horizon() const { return horizon_; }
  std::size_t x0() const { return x0_; }
  double eta() const { return experts_.eta(); }
  UpdateRule rule() const { return rule_; }
  std::optional<std::size_t> current_policy() const { return experts_.current_expert(); }

 private:
  std::shared_ptr<const std::vector<Policy>> policies_;
  ProblemShape shape_;
  std::size_t horizon_;
  std::size_t x0_;
  UpdateRule rule_;
  ExpertState experts_;
  std::vector<double> dists_;
  std::vector<double> costs_;
};

}  // namespace omdp
