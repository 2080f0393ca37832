#include "omdp/mixing.hpp"

#include <cmath>

#include <fmt/format.h>

#include "omdp/kernels.hpp"

namespace omdp {

double contraction_coefficient(const TransitionMatrix& matrix) {
  const std::size_t n = matrix.size();
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto ri = matrix.row(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto rj = matrix.row(j);
      double gap = 0.0;
      for (std::size_t k = 0; k < n; ++k) gap += std::abs(ri[k] - rj[k]);
      worst = std::max(worst, gap);
    }
  }
  return std::min(1.0, 0.5 * worst);
}

double tau_from_delta(double delta) {
  if (delta < 0.0 || delta >= 1.0) {
    throw std::domain_error(fmt::format("tau_from_delta: delta {} outside [0,1)", delta));
  }
  if (delta == 0.0) return 0.0;
  return -1.0 / std::log(delta);
}

MixingVerdict certify_mixing(std::span<const TransitionModel> models, const ProblemShape& shape,
                             std::size_t policy_cap) {
  if (models.empty()) throw std::invalid_argument("certify_mixing: no models");
  for (const auto& m : models) {
    if (m.shape() != shape) throw ShapeMismatch("certify_mixing: model shape differs");
  }
  if (deterministic_policy_count(shape) > policy_cap) {
    throw std::length_error(
        fmt::format("certify_mixing: {}^{} deterministic policies exceed the cap of {}",
                    shape.num_actions, shape.num_states, policy_cap));
  }
  const auto grid = kernels::contraction_grid_parallel(models, shape);
  const MixingWitness witness{grid.policy_index, grid.model_index};
  if (grid.value >= kRefutationThreshold) return MixingRefutation{grid.value, witness};
  return MixingCertificate{grid.value, tau_from_delta(grid.value), witness};
}

TransitionModel smooth_model(const TransitionModel& raw, double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw std::invalid_argument(fmt::format("smooth_model: gamma {} outside (0,1]", gamma));
  }
  const double floor = gamma / static_cast<double>(raw.shape().num_states);
  std::vector<double> kernel(raw.data().begin(), raw.data().end());
  for (double& v : kernel) v = (1.0 - gamma) * v + floor;
  return TransitionModel(raw.shape(), std::move(kernel));
}

std::vector<double> random_simplex_point(std::size_t n, RandomStream& rng) {
  std::vector<double> out(n);
  double sum = 0.0;
  for (double& v : out) {
    v = -std::log1p(-rng.uniform());
    sum += v;
  }
  if (sum <= 0.0) {
    std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(n));
    return out;
  }
  for (double& v : out) v /= sum;
  detail::renormalize_if_drifted(out);
  return out;
}

TransitionModel random_model(const ProblemShape& shape, RandomStream& rng) {
  std::vector<double> kernel;
  kernel.reserve(shape.num_states * shape.num_actions * shape.num_states);
  for (std::size_t r = 0; r < shape.num_states * shape.num_actions; ++r) {
    auto row = random_simplex_point(shape.num_states, rng);
    kernel.insert(kernel.end(), row.begin(), row.end());
  }
  return TransitionModel(shape, std::move(kernel));
}

Policy random_policy(const ProblemShape& shape, RandomStream& rng) {
  std::vector<double> probs;
  probs.reserve(shape.num_states * shape.num_actions);
  for (std::size_t x = 0; x < shape.num_states; ++x) {
    auto row = random_simplex_point(shape.num_actions, rng);
    probs.insert(probs.end(), row.begin(), row.end());
  }
  return Policy(shape, std::move(probs));
}

double verify_contraction_empirically(std::span<const TransitionModel> models,
                                      const ProblemShape& shape, std::size_t num_samples,
                                      RandomStream& rng) {
  if (models.empty()) return 0.0;
  const std::size_t n = shape.num_states;
  const std::size_t policies = deterministic_policy_count(shape);
  std::vector<double> out1(n), out2(n);
  double worst = 0.0;
  for (std::size_t s = 0; s < num_samples; ++s) {
    const auto d1 = random_simplex_point(n, rng);
    const auto d2 = random_simplex_point(n, rng);
    const auto pi_index = static_cast<std::size_t>(rng.uniform() * static_cast<double>(policies));
    const auto m_index = static_cast<std::size_t>(rng.uniform() * static_cast<double>(models.size()));
    double before = 0.0;
    for (std::size_t x = 0; x < n; ++x) before += std::abs(d1[x] - d2[x]);
    if (before == 0.0) continue;
    const Policy pi = deterministic_policy_at(shape, pi_index);
    kernels::step_distribution(d1, pi, models[m_index], out1);
    kernels::step_distribution(d2, pi, models[m_index], out2);
    double after = 0.0;
    for (std::size_t x = 0; x < n; ++x) after += std::abs(out1[x] - out2[x]);
    worst = std::max(worst, after / before);
  }
  return worst;
}

}  // namespace omdp
