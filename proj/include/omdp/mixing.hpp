#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "omdp/mdp_core.hpp"
#include "omdp/random.hpp"

namespace omdp {

/// (deterministic policy index in enumeration order, model index)
struct MixingWitness {
  std::size_t policy_index = 0;
  std::size_t model_index = 0;
  bool operator==(const MixingWitness&) const = default;
};

/// Every induced matrix contracts l1 distance by at least exp(-1/tau).
struct MixingCertificate {
  double delta_max = 0.0;
  double tau = 0.0;
  MixingWitness witness;
};

/// Some (policy, model) pair does not contract.
struct MixingRefutation {
  double delta_max = 1.0;
  MixingWitness witness;
};

using MixingVerdict = std::variant<MixingCertificate, MixingRefutation>;

/// delta_max at or above this is treated as no contraction.
inline constexpr double kRefutationThreshold = 1.0 - 1e-12;

/// Dobrushin coefficient: half the largest l1 distance between two rows.
double contraction_coefficient(const TransitionMatrix& matrix);

/// tau = -1/ln(delta) for delta in (0,1); 0 for delta = 0.
double tau_from_delta(double delta);

/// Checks every deterministic policy against every model; the worst pair is
/// the witness (ties keep the first pair in policy-major order).
MixingVerdict certify_mixing(std::span<const TransitionModel> models, const ProblemShape& shape,
                             std::size_t policy_cap = kDefaultPolicyCap);

/// (1 - gamma) * raw + gamma / |X|, gamma in (0, 1].
TransitionModel smooth_model(const TransitionModel& raw, double gamma);

/// Largest ||dP - d'P||_1 / ||d - d'||_1 over random distribution pairs,
/// deterministic policies and models. Pairs with d == d' are skipped.
double verify_contraction_empirically(std::span<const TransitionModel> models,
                                      const ProblemShape& shape, std::size_t num_samples,
                                      RandomStream& rng);

/// Flat-Dirichlet sample over n outcomes (normalized exponentials).
std::vector<double> random_simplex_point(std::size_t n, RandomStream& rng);

/// Raw kernel with Dirichlet(1) rows.
TransitionModel random_model(const ProblemShape& shape, RandomStream& rng);

/// Stochastic policy with Dirichlet(1) rows.
Policy random_policy(const ProblemShape& shape, RandomStream& rng);

inline bool is_certified(const MixingVerdict& v) {
  return std::holds_alternative<MixingCertificate>(v);
}

}  // namespace omdp
