#include "omdp/mdp_core.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <fmt/format.h>

namespace omdp {

namespace {

void check_probability_rows(std::span<const double> values, std::size_t row_length,
                            const char* what) {
  for (std::size_t start = 0; start < values.size(); start += row_length) {
    double sum = 0.0;
    for (std::size_t j = 0; j < row_length; ++j) {
      const double v = values[start + j];
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument(
            fmt::format("{}: entry {} of row {} is {}, expected a probability", what, j,
                        start / row_length, v));
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > kStochasticTolerance) {
      throw std::invalid_argument(
          fmt::format("{}: row {} sums to {:.17g}, expected 1", what, start / row_length, sum));
    }
  }
}

}  // namespace

ProblemShape::ProblemShape(std::size_t states, std::size_t actions)
    : num_states(states), num_actions(actions) {
  if (states == 0 || actions == 0) {
    throw std::invalid_argument("ProblemShape: need at least one state and one action");
  }
}

Policy::Policy(ProblemShape shape, std::vector<double> probs)
    : shape_(shape), probs_(std::move(probs)) {
  if (probs_.size() != shape_.num_states * shape_.num_actions) {
    throw ShapeMismatch(fmt::format("Policy: expected {}x{} entries, got {}", shape_.num_states,
                                    shape_.num_actions, probs_.size()));
  }
  check_probability_rows(probs_, shape_.num_actions, "Policy");
}

Policy Policy::deterministic(ProblemShape shape, std::span<const std::size_t> actions) {
  if (actions.size() != shape.num_states) {
    throw ShapeMismatch("Policy::deterministic: one action per state required");
  }
  std::vector<double> probs(shape.num_states * shape.num_actions, 0.0);
  for (std::size_t x = 0; x < shape.num_states; ++x) {
    if (actions[x] >= shape.num_actions) {
      throw std::out_of_range(fmt::format("Policy::deterministic: action {} out of range", actions[x]));
    }
    probs[x * shape.num_actions + actions[x]] = 1.0;
  }
  return Policy(shape, std::move(probs), trusted);
}

Policy Policy::uniform(ProblemShape shape) {
  return Policy(shape,
                std::vector<double>(shape.num_states * shape.num_actions,
                                    1.0 / static_cast<double>(shape.num_actions)),
                trusted);
}

TransitionModel::TransitionModel(ProblemShape shape, std::vector<double> kernel)
    : shape_(shape), kernel_(std::move(kernel)) {
  const std::size_t expected = shape_.num_states * shape_.num_actions * shape_.num_states;
  if (kernel_.size() != expected) {
    throw ShapeMismatch(
        fmt::format("TransitionModel: expected {} entries, got {}", expected, kernel_.size()));
  }
  check_probability_rows(kernel_, shape_.num_states, "TransitionModel");
}

TransitionModel TransitionModel::uniform(ProblemShape shape) {
  const std::size_t n = shape.num_states;
  return TransitionModel(
      shape, std::vector<double>(n * shape.num_actions * n, 1.0 / static_cast<double>(n)), trusted);
}

TransitionMatrix::TransitionMatrix(std::size_t num_states, std::vector<double> rows)
    : n_(num_states), rows_(std::move(rows)) {
  if (n_ == 0 || rows_.size() != n_ * n_) {
    throw ShapeMismatch(fmt::format("TransitionMatrix: expected {}x{} entries", n_, n_));
  }
  check_probability_rows(rows_, n_, "TransitionMatrix");
}

TransitionMatrix TransitionMatrix::identity(std::size_t num_states) {
  std::vector<double> rows(num_states * num_states, 0.0);
  for (std::size_t i = 0; i < num_states; ++i) rows[i * num_states + i] = 1.0;
  return TransitionMatrix(num_states, std::move(rows), trusted);
}

LossFunction::LossFunction(ProblemShape shape, std::vector<double> values)
    : shape_(shape), values_(std::move(values)) {
  if (values_.size() != shape_.num_states * shape_.num_actions) {
    throw ShapeMismatch(fmt::format("LossFunction: expected {}x{} entries, got {}",
                                    shape_.num_states, shape_.num_actions, values_.size()));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!(values_[i] >= 0.0 && values_[i] <= 1.0)) {
      throw std::invalid_argument(
          fmt::format("LossFunction: entry {} is {}, losses must lie in [0,1]", i, values_[i]));
    }
  }
}

LossFunction LossFunction::constant(ProblemShape shape, double value) {
  return LossFunction(shape, std::vector<double>(shape.num_states * shape.num_actions, value));
}

StateDistribution::StateDistribution(std::vector<double> mass) : mass_(std::move(mass)) {
  if (mass_.empty()) throw std::invalid_argument("StateDistribution: empty");
  check_probability_rows(mass_, mass_.size(), "StateDistribution");
}

StateDistribution StateDistribution::point_mass(std::size_t num_states, std::size_t state) {
  if (state >= num_states) {
    throw std::out_of_range(fmt::format("point_mass: state {} out of range", state));
  }
  std::vector<double> mass(num_states, 0.0);
  mass[state] = 1.0;
  return StateDistribution(std::move(mass), trusted);
}

StateDistribution StateDistribution::uniform(std::size_t num_states) {
  return StateDistribution(std::vector<double>(num_states, 1.0 / static_cast<double>(num_states)),
                           trusted);
}

namespace detail {

void renormalize_if_drifted(std::span<double> mass) {
  double sum = 0.0;
  bool negative = false;
  for (double v : mass) {
    sum += v;
    negative |= v < 0.0;
  }
  if (!negative && std::abs(sum - 1.0) <= kStochasticTolerance) return;
  sum = 0.0;
  for (double& v : mass) {
    v = v < 0.0 ? 0.0 : v;
    sum += v;
  }
  for (double& v : mass) v /= sum;
}

}  // namespace detail

TransitionMatrix induce_transition_matrix(const Policy& policy, const TransitionModel& model) {
  if (policy.shape() != model.shape()) {
    throw ShapeMismatch("induce_transition_matrix: policy and model shapes differ");
  }
  const std::size_t n = model.shape().num_states;
  const std::size_t k = model.shape().num_actions;
  std::vector<double> rows(n * n, 0.0);
  for (std::size_t x = 0; x < n; ++x) {
    double* out = rows.data() + x * n;
    for (std::size_t a = 0; a < k; ++a) {
      const double p = policy(x, a);
      if (p == 0.0) continue;
      const auto next = model.row(x, a);
      for (std::size_t y = 0; y < n; ++y) out[y] += p * next[y];
    }
  }
  return TransitionMatrix(n, std::move(rows), trusted);
}

StateDistribution propagate(const StateDistribution& dist, const TransitionMatrix& matrix) {
  const std::size_t n = matrix.size();
  if (dist.size() != n) throw ShapeMismatch("propagate: distribution and matrix sizes differ");
  std::vector<double> out(n, 0.0);
  for (std::size_t x = 0; x < n; ++x) {
    const double w = dist[x];
    if (w == 0.0) continue;
    const auto row = matrix.row(x);
    for (std::size_t y = 0; y < n; ++y) out[y] += w * row[y];
  }
  detail::renormalize_if_drifted(out);
  return StateDistribution(std::move(out), trusted);
}

double expected_loss(const StateDistribution& dist, const Policy& policy,
                     const LossFunction& loss) {
  if (policy.shape() != loss.shape() || dist.size() != policy.shape().num_states) {
    throw ShapeMismatch("expected_loss: shapes differ");
  }
  const std::size_t k = policy.shape().num_actions;
  double total = 0.0;
  for (std::size_t x = 0; x < dist.size(); ++x) {
    const auto p = policy.row(x);
    const auto l = loss.row(x);
    double inner = 0.0;
    for (std::size_t a = 0; a < k; ++a) inner += p[a] * l[a];
    total += dist[x] * inner;
  }
  return total;
}

double l1_distance(const StateDistribution& d, const StateDistribution& d2) {
  if (d.size() != d2.size()) throw ShapeMismatch("l1_distance: lengths differ");
  double total = 0.0;
  for (std::size_t x = 0; x < d.size(); ++x) total += std::abs(d[x] - d2[x]);
  return total;
}

double policy_distance(const Policy& p1, const Policy& p2) {
  if (p1.shape() != p2.shape()) throw ShapeMismatch("policy_distance: shapes differ");
  double worst = 0.0;
  for (std::size_t x = 0; x < p1.shape().num_states; ++x) {
    const auto r1 = p1.row(x);
    const auto r2 = p2.row(x);
    double gap = 0.0;
    for (std::size_t a = 0; a < r1.size(); ++a) gap += std::abs(r1[a] - r2[a]);
    worst = std::max(worst, gap);
  }
  return worst;
}

std::size_t sample_action(const Policy& policy, std::size_t state, RandomStream& rng) {
  if (state >= policy.shape().num_states) {
    throw std::out_of_range(fmt::format("sample_action: state {} out of range", state));
  }
  return sample_index(policy.row(state), rng.uniform());
}

std::size_t sample_next_state(const TransitionModel& model, std::size_t state, std::size_t action,
                              RandomStream& rng) {
  if (state >= model.shape().num_states || action >= model.shape().num_actions) {
    throw std::out_of_range(
        fmt::format("sample_next_state: (state {}, action {}) out of range", state, action));
  }
  return sample_index(model.row(state, action), rng.uniform());
}

std::size_t deterministic_policy_count(const ProblemShape& shape) {
  std::size_t count = 1;
  for (std::size_t x = 0; x < shape.num_states; ++x) {
    if (count > std::numeric_limits<std::size_t>::max() / shape.num_actions) {
      return std::numeric_limits<std::size_t>::max();
    }
    count *= shape.num_actions;
  }
  return count;
}

Policy deterministic_policy_at(const ProblemShape& shape, std::size_t index) {
  std::vector<std::size_t> actions(shape.num_states);
  // State 0 is the most significant digit.
  for (std::size_t x = shape.num_states; x-- > 0;) {
    actions[x] = index % shape.num_actions;
    index /= shape.num_actions;
  }
  return Policy::deterministic(shape, actions);
}

std::vector<Policy> enumerate_deterministic_policies(const ProblemShape& shape, std::size_t cap) {
  const std::size_t count = deterministic_policy_count(shape);
  if (count > cap) {
    throw std::length_error(fmt::format(
        "enumerate_deterministic_policies: {}^{} policies exceed the cap of {}", shape.num_actions,
        shape.num_states, cap));
  }
  std::vector<Policy> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(deterministic_policy_at(shape, i));
  return out;
}

std::size_t sample_index(std::span<const double> probs, double u) {
  double running = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] > 0.0) last_positive = i;
    running += probs[i];
    if (u < running) return i;
  }
  return last_positive;
}

}  // namespace omdp
