#pragma once

// Data-parallel kernels. Each has a serial reference with identical
// arithmetic per output element, so serial and parallel results agree bit
// for bit; tests/test_kernels.cpp holds them to that.

#include <cstddef>
#include <span>
#include <vector>

#include "omdp/mdp_core.hpp"

namespace omdp {

class AdversarySequence;

namespace kernels {

/// out = dist * P(policy, model) without forming the matrix.
void step_distribution(std::span<const double> dist, const Policy& policy,
                       const TransitionModel& model, std::span<double> out);

/// sum_x dist(x) sum_a pi(a|x) l(x,a) over raw spans.
double expected_loss(std::span<const double> dist, const Policy& policy, const LossFunction& loss);

/// One round of counterfactual bookkeeping for a whole policy class:
/// costs[i] = expected loss of dists[i], then dists[i] advances one step.
/// dists is |class| x |X|, row-major.
void observe_class_serial(std::span<const Policy> policies, const TransitionModel& model,
                          const LossFunction& loss, std::span<double> dists,
                          std::span<double> costs);
void observe_class_parallel(std::span<const Policy> policies, const TransitionModel& model,
                            const LossFunction& loss, std::span<double> dists,
                            std::span<double> costs);

/// |class| x T matrix of c_t(pi), row-major.
std::vector<double> comparator_losses_serial(std::span<const Policy> policies,
                                             const AdversarySequence& sequence, std::size_t x0);
std::vector<double> comparator_losses_parallel(std::span<const Policy> policies,
                                               const AdversarySequence& sequence, std::size_t x0);

struct GridMax {
  double value = 0.0;
  std::size_t policy_index = 0;
  std::size_t model_index = 0;
};

/// max over (deterministic policy, model) of the contraction coefficient.
GridMax contraction_grid_serial(std::span<const TransitionModel> models, const ProblemShape& shape);
GridMax contraction_grid_parallel(std::span<const TransitionModel> models,
                                  const ProblemShape& shape);

/// Minimum class size at which observe_class switches to the parallel path.
inline constexpr std::size_t kParallelClassThreshold = 256;

}  // namespace kernels
}  // namespace omdp
