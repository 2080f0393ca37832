#include "omdp/experts.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "omdp/mdp_core.hpp"

namespace omdp {

struct ExpertStateAccess {
  static void begin_choice(ExpertState& s) {
    if (s.chosen_round_ == s.round_) {
      throw std::logic_error(fmt::format("expert choice already made for round {}", s.round_));
    }
    s.chosen_round_ = s.round_;
  }

  static ExpertChoice record(ExpertState& s, std::size_t expert, bool redrawn) {
    const bool switched = s.current_.has_value() && *s.current_ != expert;
    s.current_ = expert;
    if (switched) ++s.switch_count_;
    if (redrawn) ++s.redraw_count_;
    return {expert, switched, redrawn};
  }

  static ExpertChoice draw(ExpertState& s, RandomStream& rng) {
    const auto q = s.distribution();
    return record(s, sample_index(q, rng.uniform()), true);
  }

  template <typename Step>
  static void update(ExpertState& s, std::span<const double> losses, Step step) {
    if (losses.size() != s.size()) {
      throw ShapeMismatch(fmt::format("expert update: {} losses for {} experts", losses.size(), s.size()));
    }
    for (std::size_t i = 0; i < losses.size(); ++i) {
      if (!(losses[i] >= 0.0 && losses[i] <= 1.0)) {
        throw std::invalid_argument(
            fmt::format("expert update: loss {} of expert {} outside [0,1]", losses[i], i));
      }
    }
    s.prev_log_weights_ = s.log_weights_;
    for (std::size_t i = 0; i < losses.size(); ++i) s.log_weights_[i] += step(losses[i]);
    ++s.round_;
  }
};

double learning_rate(std::size_t num_experts, std::size_t horizon) {
  if (num_experts == 0 || horizon == 0) {
    throw std::invalid_argument("learning_rate: need N >= 1 and T >= 1");
  }
  const double rate =
      std::sqrt(std::log(static_cast<double>(num_experts)) / static_cast<double>(horizon));
  return std::min(rate, 0.5);
}

ExpertState::ExpertState(std::size_t num_experts, double eta)
    : log_weights_(num_experts, 0.0), prev_log_weights_(num_experts, 0.0), eta_(eta) {
  if (num_experts == 0) throw std::invalid_argument("ExpertState: no experts");
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw std::invalid_argument(fmt::format("ExpertState: eta {} outside [0,1]", eta));
  }
}

std::vector<double> ExpertState::distribution() const {
  const double top = *std::max_element(log_weights_.begin(), log_weights_.end());
  std::vector<double> q(log_weights_.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    q[i] = std::exp(log_weights_[i] - top);
    sum += q[i];
  }
  for (double& v : q) v /= sum;
  return q;
}

double ExpertState::log_total_weight() const {
  const double top = *std::max_element(log_weights_.begin(), log_weights_.end());
  double sum = 0.0;
  for (double lw : log_weights_) sum += std::exp(lw - top);
  return top + std::log(sum);
}

double ExpertState::stay_probability() const {
  if (!current_ || round_ == 1) return 1.0;
  return std::exp(log_weights_[*current_] - prev_log_weights_[*current_]);
}

ExpertChoice sd_choose(ExpertState& state, RandomStream& rng) {
  ExpertStateAccess::begin_choice(state);
  if (!state.current_expert()) return ExpertStateAccess::draw(state, rng);
  const double beta = state.stay_probability();
  if (rng.uniform() < beta) {
    return ExpertStateAccess::record(state, *state.current_expert(), false);
  }
  return ExpertStateAccess::draw(state, rng);
}

void sd_update(ExpertState& state, std::span<const double> losses) {
  if (state.eta() >= 1.0) throw std::invalid_argument("sd_update: needs eta < 1");
  const double log_factor = std::log1p(-state.eta());
  ExpertStateAccess::update(state, losses, [log_factor](double c) { return c * log_factor; });
}

ExpertChoice ewa_choose(ExpertState& state, RandomStream& rng) {
  ExpertStateAccess::begin_choice(state);
  return ExpertStateAccess::draw(state, rng);
}

void ewa_update(ExpertState& state, std::span<const double> losses) {
  const double eta = state.eta();
  ExpertStateAccess::update(state, losses, [eta](double c) { return -eta * c; });
}

}  // namespace omdp
