#pragma once

#include <vector>

#include "omdp/adversary.hpp"
#include "omdp/mdp_core.hpp"

namespace fixture {

inline const omdp::ProblemShape kTwoByTwo{2, 2};

// Action 0 keeps the state, action 1 flips it.
inline omdp::TransitionModel stay_or_flip() {
  return omdp::TransitionModel(kTwoByTwo, {1, 0, 0, 1, 0, 1, 1, 0});
}

// Loss 1 exactly in state 1.
inline omdp::LossFunction state_one_costs() { return omdp::LossFunction(kTwoByTwo, {0, 0, 1, 1}); }

inline omdp::Policy always(std::size_t action) {
  const std::vector<std::size_t> acts(2, action);
  return omdp::Policy::deterministic(kTwoByTwo, acts);
}

// Two-state sequence with noisy kernels and varying losses; mixes.
inline omdp::AdversarySequence two_state_sequence(std::size_t T) {
  std::vector<omdp::TransitionModel> models;
  std::vector<omdp::LossFunction> losses;
  for (std::size_t t = 1; t <= T; ++t) {
    const double p = 0.2 + 0.1 * static_cast<double>(t % 5);
    models.emplace_back(kTwoByTwo,
                        std::vector<double>{0.9, 0.1, p, 1 - p, 0.3, 0.7, 1 - p, p});
    const double s = 0.5 + 0.4 * ((t % 3 == 0) ? 1.0 : -0.5);
    losses.emplace_back(kTwoByTwo, std::vector<double>{s, 1 - s, 0.2, 0.9 * s});
  }
  return omdp::AdversarySequence(kTwoByTwo, std::move(models), std::move(losses));
}

}  // namespace fixture
