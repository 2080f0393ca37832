// Serial reference versus OpenMP kernels. Thread count follows
// OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <memory>
#include <vector>

#include "omdp/adversary.hpp"
#include "omdp/cover.hpp"
#include "omdp/harness.hpp"
#include "omdp/kernels.hpp"
#include "omdp/mixing.hpp"

using namespace omdp;

namespace {

const ProblemShape kShape{3, 3};

const std::vector<Policy>& cover_class() {
  static const auto policies = build_cover(kShape, 1.0).policies;
  return policies;
}

template <bool Parallel>
void BM_ObserveClass(benchmark::State& state) {
  const auto& policies = cover_class();
  RandomStream rng(1);
  const auto model = smooth_model(random_model(kShape, rng), 0.25);
  std::vector<double> values(kShape.num_states * kShape.num_actions);
  for (auto& v : values) v = rng.uniform();
  const LossFunction loss(kShape, values);
  std::vector<double> dists(policies.size() * kShape.num_states, 1.0 / kShape.num_states);
  std::vector<double> costs(policies.size());
  for (auto _ : state) {
    if constexpr (Parallel) {
      kernels::observe_class_parallel(policies, model, loss, dists, costs);
    } else {
      kernels::observe_class_serial(policies, model, loss, dists, costs);
    }
    benchmark::DoNotOptimize(costs.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(policies.size()));
}

AdversarySequence bench_sequence(std::size_t T) {
  AdversaryScript s;
  s.kind = AdversaryKind::random_smoothed;
  s.shape = {4, 2};
  s.seed = 2;
  return precompute(s, T);
}

template <bool Parallel>
void BM_ComparatorLosses(benchmark::State& state) {
  const auto seq = bench_sequence(static_cast<std::size_t>(state.range(0)));
  const auto policies = enumerate_deterministic_policies(seq.shape());
  for (auto _ : state) {
    auto out = Parallel ? kernels::comparator_losses_parallel(policies, seq, 0)
                        : kernels::comparator_losses_serial(policies, seq, 0);
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Parallel>
void BM_ContractionGrid(benchmark::State& state) {
  const ProblemShape shape{5, 3};
  RandomStream rng(3);
  std::vector<TransitionModel> models;
  for (int i = 0; i < state.range(0); ++i) models.push_back(smooth_model(random_model(shape, rng), 0.25));
  for (auto _ : state) {
    const auto g = Parallel ? kernels::contraction_grid_parallel(models, shape)
                            : kernels::contraction_grid_serial(models, shape);
    benchmark::DoNotOptimize(g.value);
  }
}

template <bool Parallel>
void BM_MonteCarlo(benchmark::State& state) {
  const auto seq = bench_sequence(2000);
  MonteCarloSpec spec;
  spec.policies = std::make_shared<const std::vector<Policy>>(enumerate_deterministic_policies(seq.shape()));
  spec.shape = seq.shape();
  for (std::uint64_t s = 1; s <= static_cast<std::uint64_t>(state.range(0)); ++s) spec.seeds.push_back(s);
  for (auto _ : state) {
    const auto summary = Parallel ? monte_carlo(spec, seq) : monte_carlo_serial(spec, seq);
    benchmark::DoNotOptimize(summary.mean_regret);
  }
}

}  // namespace

BENCHMARK(BM_ObserveClass<false>)->Name("observe_class/serial");
BENCHMARK(BM_ObserveClass<true>)->Name("observe_class/parallel");
BENCHMARK(BM_ComparatorLosses<false>)->Name("comparator_losses/serial")->Arg(5000);
BENCHMARK(BM_ComparatorLosses<true>)->Name("comparator_losses/parallel")->Arg(5000);
BENCHMARK(BM_ContractionGrid<false>)->Name("contraction_grid/serial")->Arg(64);
BENCHMARK(BM_ContractionGrid<true>)->Name("contraction_grid/parallel")->Arg(64);
BENCHMARK(BM_MonteCarlo<false>)->Name("monte_carlo/serial")->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MonteCarlo<true>)->Name("monte_carlo/parallel")->Arg(16)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
