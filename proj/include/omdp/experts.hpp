#pragma once

// Full-information expert learners in log space.
//
// Exponentially weighted average (EWA) multiplies weight i by exp(-eta c_i)
// and draws a fresh expert each round. Shrinking Dartboard (SD) multiplies by
// (1 - eta)^{c_i} and keeps its previous expert with probability equal to
// that expert's last weight ratio, redrawing from the normalized weights
// otherwise. Both keep the marginal law of the chosen expert equal to the
// normalized weights; SD switches with probability at most eta per round.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "omdp/random.hpp"

namespace omdp {

/// min(sqrt(ln N / T), 1/2)
double learning_rate(std::size_t num_experts, std::size_t horizon);

class ExpertState {
 public:
  /// eta in [0, 1]; the dartboard update additionally needs eta < 1.
  ExpertState(std::size_t num_experts, double eta);

  std::size_t size() const { return log_weights_.size(); }
  double eta() const { return eta_; }
  /// Round about to be played, starting at 1.
  std::size_t round() const { return round_; }
  std::size_t switch_count() const { return switch_count_; }
  std::size_t redraw_count() const { return redraw_count_; }
  std::optional<std::size_t> current_expert() const { return current_; }

  std::span<const double> log_weights() const { return log_weights_; }
  std::span<const double> prev_log_weights() const { return prev_log_weights_; }

  /// q_t: normalized weights (max-shifted exponentiation).
  std::vector<double> distribution() const;
  /// ln W_t
  double log_total_weight() const;
  /// SD stay probability beta_t for the current expert; 1 in round 1.
  double stay_probability() const;
  /// 1 - beta_t.
  double redraw_probability() const { return 1.0 - stay_probability(); }

 private:
  friend struct ExpertStateAccess;

  std::vector<double> log_weights_;
  std::vector<double> prev_log_weights_;
  std::optional<std::size_t> current_;
  std::size_t chosen_round_ = 0;
  double eta_;
  std::size_t round_ = 1;
  std::size_t switch_count_ = 0;
  std::size_t redraw_count_ = 0;
};

struct ExpertChoice {
  std::size_t expert = 0;
  bool switched = false;
  bool redrawn = false;
};

/// Round 1 draws from the uniform q_1 with one uniform and never counts a
/// switch. Later rounds consume one uniform for the stay decision and one
/// more if a redraw happens. A switch is an index change.
ExpertChoice sd_choose(ExpertState& state, RandomStream& rng);

/// log w_i += c_i ln(1 - eta); losses must lie in [0,1] and eta < 1.
void sd_update(ExpertState& state, std::span<const double> losses);

/// Fresh draw from q_t every round (one uniform).
ExpertChoice ewa_choose(ExpertState& state, RandomStream& rng);

/// log w_i -= eta c_i
void ewa_update(ExpertState& state, std::span<const double> losses);

}  // namespace omdp
