#include "omdp/kernels.hpp"

#include <algorithm>

#include <omp.h>

#include "omdp/adversary.hpp"
#include "omdp/mixing.hpp"

namespace omdp::kernels {

void step_distribution(std::span<const double> dist, const Policy& policy,
                       const TransitionModel& model, std::span<double> out) {
  const std::size_t n = model.shape().num_states;
  const std::size_t k = model.shape().num_actions;
  std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(n), 0.0);
  for (std::size_t x = 0; x < n; ++x) {
    const double w = dist[x];
    if (w == 0.0) continue;
    for (std::size_t a = 0; a < k; ++a) {
      const double p = w * policy(x, a);
      if (p == 0.0) continue;
      const auto next = model.row(x, a);
      for (std::size_t y = 0; y < n; ++y) out[y] += p * next[y];
    }
  }
  detail::renormalize_if_drifted(out.first(n));
}

double expected_loss(std::span<const double> dist, const Policy& policy, const LossFunction& loss) {
  const std::size_t k = policy.shape().num_actions;
  double total = 0.0;
  for (std::size_t x = 0; x < dist.size(); ++x) {
    if (dist[x] == 0.0) continue;
    const auto p = policy.row(x);
    const auto l = loss.row(x);
    double inner = 0.0;
    for (std::size_t a = 0; a < k; ++a) inner += p[a] * l[a];
    total += dist[x] * inner;
  }
  return std::clamp(total, 0.0, 1.0);
}

namespace {

inline void observe_one(const Policy& policy, const TransitionModel& model,
                        const LossFunction& loss, std::span<double> dist, double& cost,
                        std::span<double> scratch) {
  cost = expected_loss(dist, policy, loss);
  step_distribution(dist, policy, model, scratch);
  std::copy(scratch.begin(), scratch.end(), dist.begin());
}

void check_observe_shapes(std::span<const Policy> policies, const TransitionModel& model,
                          const LossFunction& loss, std::span<double> dists,
                          std::span<double> costs) {
  const std::size_t n = model.shape().num_states;
  if (model.shape() != loss.shape() || costs.size() != policies.size() ||
      dists.size() != policies.size() * n) {
    throw ShapeMismatch("observe_class: inconsistent shapes");
  }
}

void comparator_row(const Policy& policy, const AdversarySequence& sequence, std::size_t x0,
                    std::span<double> row) {
  const std::size_t n = sequence.shape().num_states;
  std::vector<double> dist(n, 0.0), next(n);
  dist[x0] = 1.0;
  for (std::size_t t = 1; t <= sequence.horizon(); ++t) {
    row[t - 1] = expected_loss(dist, policy, sequence.loss(t));
    step_distribution(dist, policy, sequence.model(t), next);
    dist.swap(next);
  }
}

}  // namespace

void observe_class_serial(std::span<const Policy> policies, const TransitionModel& model,
                          const LossFunction& loss, std::span<double> dists,
                          std::span<double> costs) {
  check_observe_shapes(policies, model, loss, dists, costs);
  const std::size_t n = model.shape().num_states;
  std::vector<double> scratch(n);
  for (std::size_t i = 0; i < policies.size(); ++i) {
    observe_one(policies[i], model, loss, dists.subspan(i * n, n), costs[i], scratch);
  }
}

void observe_class_parallel(std::span<const Policy> policies, const TransitionModel& model,
                            const LossFunction& loss, std::span<double> dists,
                            std::span<double> costs) {
  check_observe_shapes(policies, model, loss, dists, costs);
  const std::size_t n = model.shape().num_states;
  const auto count = static_cast<std::ptrdiff_t>(policies.size());
#pragma omp parallel
  {
    std::vector<double> scratch(n);
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      const auto u = static_cast<std::size_t>(i);
      observe_one(policies[u], model, loss, dists.subspan(u * n, n), costs[u], scratch);
    }
  }
}

std::vector<double> comparator_losses_serial(std::span<const Policy> policies,
                                             const AdversarySequence& sequence, std::size_t x0) {
  const std::size_t T = sequence.horizon();
  std::vector<double> out(policies.size() * T);
  for (std::size_t i = 0; i < policies.size(); ++i) {
    comparator_row(policies[i], sequence, x0, std::span<double>(out).subspan(i * T, T));
  }
  return out;
}

std::vector<double> comparator_losses_parallel(std::span<const Policy> policies,
                                               const AdversarySequence& sequence, std::size_t x0) {
  const std::size_t T = sequence.horizon();
  std::vector<double> out(policies.size() * T);
  const auto count = static_cast<std::ptrdiff_t>(policies.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const auto u = static_cast<std::size_t>(i);
    comparator_row(policies[u], sequence, x0, std::span<double>(out).subspan(u * T, T));
  }
  return out;
}

namespace {

// Larger value wins; equal values keep the earlier (policy, model) pair.
inline void merge_max(GridMax& best, const GridMax& candidate) {
  if (candidate.value > best.value ||
      (candidate.value == best.value &&
       (candidate.policy_index < best.policy_index ||
        (candidate.policy_index == best.policy_index &&
         candidate.model_index < best.model_index)))) {
    best = candidate;
  }
}

GridMax grid_row(std::span<const TransitionModel> models, const ProblemShape& shape,
                 std::size_t policy_index) {
  const Policy pi = deterministic_policy_at(shape, policy_index);
  GridMax best{-1.0, policy_index, 0};
  for (std::size_t m = 0; m < models.size(); ++m) {
    const double delta = contraction_coefficient(induce_transition_matrix(pi, models[m]));
    if (delta > best.value) best = GridMax{delta, policy_index, m};
  }
  return best;
}

}  // namespace

GridMax contraction_grid_serial(std::span<const TransitionModel> models, const ProblemShape& shape) {
  const std::size_t count = deterministic_policy_count(shape);
  GridMax best{-1.0, 0, 0};
  for (std::size_t p = 0; p < count; ++p) {
    const auto row = grid_row(models, shape, p);
    if (row.value > best.value) best = row;
  }
  return best;
}

GridMax contraction_grid_parallel(std::span<const TransitionModel> models,
                                  const ProblemShape& shape) {
  const auto count = static_cast<std::ptrdiff_t>(deterministic_policy_count(shape));
  GridMax best{-1.0, 0, 0};
#pragma omp parallel
  {
    GridMax local{-1.0, 0, 0};
#pragma omp for schedule(static) nowait
    for (std::ptrdiff_t p = 0; p < count; ++p) {
      merge_max(local, grid_row(models, shape, static_cast<std::size_t>(p)));
    }
#pragma omp critical
    merge_max(best, local);
  }
  return best;
}

}  // namespace omdp::kernels
