#pragma once

#include <cstddef>
#include <vector>

#include "omdp/adversary.hpp"
#include "omdp/mdp_core.hpp"

namespace omdp {

inline constexpr std::size_t kDefaultCoverCap = 1'000'000;

/// Finite epsilon-cover of all policies under ||.||_{inf,1}.
///
/// Each state's action distribution ranges over the grid of vectors whose
/// entries are multiples of 1/k, k = ceil(2|A|/epsilon); the cover is every
/// combination of per-state grid points, state 0 most significant.
struct CoverSpec {
  double epsilon = 1.0;
  ProblemShape shape;
  std::size_t resolution = 1;
  std::vector<Policy> policies;
  /// Grid points per state, in enumeration order (each |A| long).
  std::vector<std::vector<double>> state_grid;
  /// (|A|/epsilon)^{|A||X|}, the covering-number bound for the optimal cover.
  double optimal_cover_bound = 0.0;
  /// The bound is stated for epsilon <= 1 only.
  bool bound_applies = false;
  bool within_bound = false;
};

std::size_t cover_resolution(std::size_t num_actions, double epsilon);

/// Grid points on the simplex with denominator k: C(k + |A| - 1, |A| - 1).
std::size_t simplex_grid_size(std::size_t num_actions, std::size_t resolution);

/// Throws std::length_error when the cover would exceed `cap` policies.
CoverSpec build_cover(const ProblemShape& shape, double epsilon, std::size_t cap = kDefaultCoverCap);

/// Index of the cover element obtained by rounding each row of `policy`
/// to the grid (floor, then hand the leftover units to the largest
/// remainders, ties to the lowest action).
std::size_t nearest_cover_index(const CoverSpec& cover, const Policy& policy);

/// L_T(pi) = sum_t E[l_t(x_t^pi, pi)] by exact propagation.
double policy_value(const Policy& policy, const AdversarySequence& sequence, std::size_t x0);

/// max_t ||u_{p1,t} - u_{p2,t}||_1 along the two counterfactual state laws.
double max_state_law_gap(const Policy& p1, const Policy& p2, const AdversarySequence& sequence,
                         std::size_t x0);

/// 1 / (1 - exp(-1/tau)): the geometric-series constant bounding the state
/// law gap per unit of policy distance; 1 when tau = 0.
double state_gap_constant(double tau);

struct LipschitzCheck {
  double lhs = 0.0;         // |L_T(p1) - L_T(p2)|
  double distance = 0.0;    // ||p1 - p2||_{inf,1}
  double rhs = 0.0;         // state_gap_constant(tau) * T * distance
  double rhs_stated = 0.0;  // max(tau, 1) * T * distance
  bool ok = false;          // lhs <= rhs + 1e-9
  bool stated_ok = false;   // lhs <= rhs_stated + 1e-9
};

LipschitzCheck lipschitz_check(const Policy& p1, const Policy& p2,
                               const AdversarySequence& sequence, std::size_t x0, double tau);

}  // namespace omdp
