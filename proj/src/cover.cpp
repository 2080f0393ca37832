#include "omdp/cover.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include <fmt/format.h>

#include "omdp/kernels.hpp"

namespace omdp {

namespace {

constexpr std::size_t kSaturated = std::numeric_limits<std::size_t>::max();

std::size_t saturating_mul(std::size_t a, std::size_t b) {
  if (a != 0 && b > kSaturated / a) return kSaturated;
  return a * b;
}

// Compositions of `total` into `parts` nonnegative integers, lexicographic
// with the first part descending from `total`.
void enumerate_compositions(std::size_t parts, std::size_t total, std::vector<std::size_t>& prefix,
                            std::vector<std::vector<std::size_t>>& out) {
  if (parts == 1) {
    prefix.push_back(total);
    out.push_back(prefix);
    prefix.pop_back();
    return;
  }
  for (std::size_t first = total + 1; first-- > 0;) {
    prefix.push_back(first);
    enumerate_compositions(parts - 1, total - first, prefix, out);
    prefix.pop_back();
  }
}

std::vector<std::size_t> round_to_grid(std::span<const double> row, std::size_t k) {
  const std::size_t a = row.size();
  std::vector<std::size_t> units(a);
  std::vector<double> remainder(a);
  std::size_t used = 0;
  for (std::size_t i = 0; i < a; ++i) {
    const double scaled = row[i] * static_cast<double>(k);
    const double fl = std::floor(scaled);
    units[i] = static_cast<std::size_t>(fl);
    remainder[i] = scaled - fl;
    used += units[i];
  }
  // Rows summing to slightly above 1 can overshoot by a unit.
  while (used > k) {
    const auto i = static_cast<std::size_t>(
        std::min_element(remainder.begin(), remainder.end()) - remainder.begin());
    if (units[i] > 0) {
      --units[i];
      --used;
    }
    remainder[i] = std::numeric_limits<double>::infinity();
  }
  std::vector<std::size_t> order(a);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t l, std::size_t r) { return remainder[l] > remainder[r]; });
  for (std::size_t j = 0; used < k; ++j) {
    ++units[order[j % a]];
    ++used;
  }
  return units;
}

}  // namespace

std::size_t cover_resolution(std::size_t num_actions, double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 2.0)) {
    throw std::invalid_argument(fmt::format("cover: epsilon {} outside (0, 2]", epsilon));
  }
  return static_cast<std::size_t>(std::ceil(2.0 * static_cast<double>(num_actions) / epsilon));
}

std::size_t simplex_grid_size(std::size_t num_actions, std::size_t resolution) {
  // C(k + A - 1, A - 1) by the multiplicative formula, saturating.
  std::size_t result = 1;
  for (std::size_t i = 1; i < num_actions; ++i) {
    const std::size_t num = resolution + i;
    if (result > kSaturated / num) return kSaturated;
    result = result * num / i;
  }
  return result;
}

CoverSpec build_cover(const ProblemShape& shape, double epsilon, std::size_t cap) {
  CoverSpec cover;
  cover.epsilon = epsilon;
  cover.shape = shape;
  cover.resolution = cover_resolution(shape.num_actions, epsilon);

  const std::size_t per_state = simplex_grid_size(shape.num_actions, cover.resolution);
  std::size_t total = 1;
  for (std::size_t x = 0; x < shape.num_states; ++x) total = saturating_mul(total, per_state);
  if (total > cap) {
    throw std::length_error(fmt::format(
        "cover: {} grid points per state over {} states exceed the cap of {} policies", per_state,
        shape.num_states, cap));
  }

  std::vector<std::vector<std::size_t>> compositions;
  std::vector<std::size_t> prefix;
  enumerate_compositions(shape.num_actions, cover.resolution, prefix, compositions);
  const double k = static_cast<double>(cover.resolution);
  for (const auto& c : compositions) {
    std::vector<double> row(c.size());
    for (std::size_t a = 0; a < c.size(); ++a) row[a] = static_cast<double>(c[a]) / k;
    cover.state_grid.push_back(std::move(row));
  }

  cover.policies.reserve(total);
  std::vector<double> probs(shape.num_states * shape.num_actions);
  for (std::size_t index = 0; index < total; ++index) {
    std::size_t rest = index;
    for (std::size_t x = shape.num_states; x-- > 0;) {
      const auto& row = cover.state_grid[rest % per_state];
      rest /= per_state;
      std::copy(row.begin(), row.end(), probs.begin() + static_cast<std::ptrdiff_t>(x * shape.num_actions));
    }
    cover.policies.emplace_back(shape, probs);
  }

  cover.optimal_cover_bound =
      std::pow(static_cast<double>(shape.num_actions) / epsilon,
               static_cast<double>(shape.num_actions * shape.num_states));
  cover.bound_applies = epsilon <= 1.0;
  cover.within_bound = static_cast<double>(cover.policies.size()) <= cover.optimal_cover_bound;
  return cover;
}

std::size_t nearest_cover_index(const CoverSpec& cover, const Policy& policy) {
  if (policy.shape() != cover.shape) throw ShapeMismatch("nearest_cover_index: shape differs");
  // Rank compositions through a lookup built from the stored grid.
  std::map<std::vector<std::size_t>, std::size_t> rank;
  for (std::size_t g = 0; g < cover.state_grid.size(); ++g) {
    std::vector<std::size_t> units;
    for (double v : cover.state_grid[g]) {
      units.push_back(static_cast<std::size_t>(std::llround(v * static_cast<double>(cover.resolution))));
    }
    rank.emplace(std::move(units), g);
  }
  const std::size_t per_state = cover.state_grid.size();
  std::size_t index = 0;
  for (std::size_t x = 0; x < cover.shape.num_states; ++x) {
    index = index * per_state + rank.at(round_to_grid(policy.row(x), cover.resolution));
  }
  return index;
}

double policy_value(const Policy& policy, const AdversarySequence& sequence, std::size_t x0) {
  const auto row = kernels::comparator_losses_serial(std::span<const Policy>(&policy, 1), sequence, x0);
  return std::accumulate(row.begin(), row.end(), 0.0);
}

double max_state_law_gap(const Policy& p1, const Policy& p2, const AdversarySequence& sequence,
                         std::size_t x0) {
  const std::size_t n = sequence.shape().num_states;
  std::vector<double> u1(n, 0.0), u2(n, 0.0), next(n);
  u1.at(x0) = 1.0;
  u2.at(x0) = 1.0;
  double worst = 0.0;
  for (std::size_t t = 1; t <= sequence.horizon(); ++t) {
    kernels::step_distribution(u1, p1, sequence.model(t), next);
    u1.swap(next);
    kernels::step_distribution(u2, p2, sequence.model(t), next);
    u2.swap(next);
    double gap = 0.0;
    for (std::size_t x = 0; x < n; ++x) gap += std::abs(u1[x] - u2[x]);
    worst = std::max(worst, gap);
  }
  return worst;
}

double state_gap_constant(double tau) {
  if (tau < 0.0) throw std::invalid_argument("state_gap_constant: negative tau");
  if (tau == 0.0) return 1.0;
  return 1.0 / -std::expm1(-1.0 / tau);
}

LipschitzCheck lipschitz_check(const Policy& p1, const Policy& p2,
                               const AdversarySequence& sequence, std::size_t x0, double tau) {
  LipschitzCheck check;
  const double T = static_cast<double>(sequence.horizon());
  check.lhs = std::abs(policy_value(p1, sequence, x0) - policy_value(p2, sequence, x0));
  check.distance = policy_distance(p1, p2);
  check.rhs = state_gap_constant(tau) * T * check.distance;
  check.rhs_stated = std::max(tau, 1.0) * T * check.distance;
  check.ok = check.lhs <= check.rhs + 1e-9;
  check.stated_ok = check.lhs <= check.rhs_stated + 1e-9;
  return check;
}

}  // namespace omdp
