#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "omdp/random.hpp"

namespace omdp {

/// Tolerance on row sums of stochastic objects.
inline constexpr double kStochasticTolerance = 1e-12;

/// Thrown when two objects that must share dimensions do not.
class ShapeMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ProblemShape {
  std::size_t num_states = 1;
  std::size_t num_actions = 1;

  ProblemShape() = default;
  ProblemShape(std::size_t states, std::size_t actions);

  bool operator==(const ProblemShape&) const = default;
};

/// Skips validation; only for outputs that are stochastic by construction.
struct trusted_t {
  explicit trusted_t() = default;
};
inline constexpr trusted_t trusted{};

/// Stationary policy: row x holds pi(.|x).
class Policy {
 public:
  Policy(ProblemShape shape, std::vector<double> probs);
  Policy(ProblemShape shape, std::vector<double> probs, trusted_t)
      : shape_(shape), probs_(std::move(probs)) {}

  static Policy deterministic(ProblemShape shape, std::span<const std::size_t> actions);
  static Policy uniform(ProblemShape shape);

  const ProblemShape& shape() const { return shape_; }
  double operator()(std::size_t state, std::size_t action) const {
    return probs_[state * shape_.num_actions + action];
  }
  std::span<const double> row(std::size_t state) const {
    return {probs_.data() + state * shape_.num_actions, shape_.num_actions};
  }
  std::span<const double> data() const { return probs_; }

  bool operator==(const Policy&) const = default;

 private:
  ProblemShape shape_;
  std::vector<double> probs_;
};

/// Kernel m(x'|x,a), stored as |X| x |A| rows of length |X|.
class TransitionModel {
 public:
  TransitionModel(ProblemShape shape, std::vector<double> kernel);
  TransitionModel(ProblemShape shape, std::vector<double> kernel, trusted_t)
      : shape_(shape), kernel_(std::move(kernel)) {}

  /// Same next-state law for every (x, a).
  static TransitionModel uniform(ProblemShape shape);

  const ProblemShape& shape() const { return shape_; }
  double operator()(std::size_t state, std::size_t action, std::size_t next) const {
    return kernel_[(state * shape_.num_actions + action) * shape_.num_states + next];
  }
  std::span<const double> row(std::size_t state, std::size_t action) const {
    return {kernel_.data() + (state * shape_.num_actions + action) * shape_.num_states,
            shape_.num_states};
  }
  std::span<const double> data() const { return kernel_; }

  bool operator==(const TransitionModel&) const = default;

 private:
  ProblemShape shape_;
  std::vector<double> kernel_;
};

/// State-to-state matrix P(pi, m).
class TransitionMatrix {
 public:
  TransitionMatrix(std::size_t num_states, std::vector<double> rows);
  TransitionMatrix(std::size_t num_states, std::vector<double> rows, trusted_t)
      : n_(num_states), rows_(std::move(rows)) {}

  static TransitionMatrix identity(std::size_t num_states);

  std::size_t size() const { return n_; }
  double operator()(std::size_t from, std::size_t to) const { return rows_[from * n_ + to]; }
  std::span<const double> row(std::size_t from) const { return {rows_.data() + from * n_, n_}; }
  std::span<const double> data() const { return rows_; }

 private:
  std::size_t n_;
  std::vector<double> rows_;
};

/// Loss l(x, a) in [0, 1].
class LossFunction {
 public:
  LossFunction(ProblemShape shape, std::vector<double> values);

  static LossFunction constant(ProblemShape shape, double value);

  const ProblemShape& shape() const { return shape_; }
  double operator()(std::size_t state, std::size_t action) const {
    return values_[state * shape_.num_actions + action];
  }
  std::span<const double> row(std::size_t state) const {
    return {values_.data() + state * shape_.num_actions, shape_.num_actions};
  }
  std::span<const double> data() const { return values_; }

  bool operator==(const LossFunction&) const = default;

 private:
  ProblemShape shape_;
  std::vector<double> values_;
};

class StateDistribution {
 public:
  explicit StateDistribution(std::vector<double> mass);
  StateDistribution(std::vector<double> mass, trusted_t) : mass_(std::move(mass)) {}

  static StateDistribution point_mass(std::size_t num_states, std::size_t state);
  static StateDistribution uniform(std::size_t num_states);

  std::size_t size() const { return mass_.size(); }
  double operator[](std::size_t x) const { return mass_[x]; }
  std::span<const double> data() const { return mass_; }

 private:
  std::vector<double> mass_;
};

TransitionMatrix induce_transition_matrix(const Policy& policy, const TransitionModel& model);

/// dist * matrix, renormalized when the sum drifts from 1 by more than 1e-12.
StateDistribution propagate(const StateDistribution& dist, const TransitionMatrix& matrix);

/// sum_x dist(x) sum_a pi(a|x) l(x,a)
double expected_loss(const StateDistribution& dist, const Policy& policy,
                     const LossFunction& loss);

double l1_distance(const StateDistribution& d, const StateDistribution& d2);

/// ||p1 - p2||_{inf,1}: largest per-state l1 gap between action rows.
double policy_distance(const Policy& p1, const Policy& p2);

/// Draws from pi(.|state) with one uniform.
std::size_t sample_action(const Policy& policy, std::size_t state, RandomStream& rng);

/// Draws from m(.|state, action) with one uniform.
std::size_t sample_next_state(const TransitionModel& model, std::size_t state, std::size_t action,
                              RandomStream& rng);

inline constexpr std::size_t kDefaultPolicyCap = 4096;

/// All |A|^|X| deterministic policies, lexicographic with state 0 most
/// significant: the first policy plays action 0 everywhere.
std::vector<Policy> enumerate_deterministic_policies(const ProblemShape& shape,
                                                     std::size_t cap = kDefaultPolicyCap);

/// Number of deterministic policies, or nullopt-like saturation at SIZE_MAX.
std::size_t deterministic_policy_count(const ProblemShape& shape);

/// The index'th policy in enumeration order (no materialization).
Policy deterministic_policy_at(const ProblemShape& shape, std::size_t index);

namespace detail {
/// In-place renormalization used by propagate and the fused kernels.
void renormalize_if_drifted(std::span<double> mass);
}  // namespace detail

}  // namespace omdp
