#include <gtest/gtest.h>

#include "omdp/adversary.hpp"
#include "omdp/mixing.hpp"

using namespace omdp;

namespace {

const ProblemShape k42{4, 2};

AdversaryScript script_of(AdversaryKind kind, std::uint64_t seed = 11, std::size_t period = 5) {
  AdversaryScript s;
  s.kind = kind;
  s.shape = k42;
  s.seed = seed;
  s.period = period;
  return s;
}

const AdversaryKind kSmoothedKinds[] = {AdversaryKind::fixed, AdversaryKind::model_switching,
                                        AdversaryKind::random_smoothed, AdversaryKind::leader_punisher,
                                        AdversaryKind::sinusoidal_loss};

}  // namespace

TEST(Adversary, NamesRoundTrip) {
  for (auto kind : kSmoothedKinds) EXPECT_EQ(parse_adversary_kind(to_string(kind)), kind);
  EXPECT_EQ(parse_adversary_kind("scripted"), AdversaryKind::scripted);
  EXPECT_FALSE(parse_adversary_kind("adaptive"));
  EXPECT_EQ(to_string(AdversaryKind::leader_punisher), "leader-punisher-oblivious");
}

TEST(Adversary, FixedEmitsSamePairEveryRound) {
  const auto s = script_of(AdversaryKind::fixed);
  const auto first = emit(s, 1);
  for (std::size_t t = 2; t <= 50; ++t) {
    const auto r = emit(s, t);
    EXPECT_EQ(r.model, first.model);
    EXPECT_EQ(r.loss, first.loss);
  }
}

TEST(Adversary, ModelSwitchingIsPeriodic) {
  const auto s = script_of(AdversaryKind::model_switching, 3, 7);
  EXPECT_EQ(emit(s, 1).model, emit(s, 7).model);
  EXPECT_FALSE(emit(s, 7).model == emit(s, 8).model);
  for (std::size_t t = 1; t <= 40; ++t) {
    EXPECT_EQ(emit(s, t).model, emit(s, t + 14).model);
    EXPECT_EQ(emit(s, t).loss, emit(s, t + 14).loss);
  }
}

TEST(Adversary, DeterministicAcrossInstances) {
  for (auto kind : kSmoothedKinds) {
    const auto a = precompute(script_of(kind), 60);
    const auto b = precompute(script_of(kind), 60);
    EXPECT_EQ(a.models(), b.models());
    EXPECT_EQ(a.losses(), b.losses());
  }
}

TEST(Adversary, SeedsChangeTheSequence) {
  const auto a = precompute(script_of(AdversaryKind::random_smoothed, 1), 5);
  const auto b = precompute(script_of(AdversaryKind::random_smoothed, 2), 5);
  EXPECT_FALSE(a.models() == b.models());
}

TEST(Adversary, PrecomputeMatchesStreamingEmit) {
  for (auto kind : kSmoothedKinds) {
    const auto s = script_of(kind);
    const auto seq = precompute(s, 40);
    for (std::size_t t = 1; t <= 40; ++t) {
      const auto r = emit(s, t);
      EXPECT_EQ(seq.model(t), r.model) << to_string(kind) << " t=" << t;
      EXPECT_EQ(seq.loss(t), r.loss);
    }
  }
}

TEST(Adversary, EmptyAndOutOfRange) {
  EXPECT_EQ(precompute(script_of(AdversaryKind::fixed), 0).horizon(), 0u);
  auto s = script_of(AdversaryKind::fixed);
  s.horizon = 10;
  EXPECT_THROW(emit(s, 0), std::out_of_range);
  EXPECT_THROW(emit(s, 11), std::out_of_range);
  EXPECT_THROW(precompute(s, 11), std::out_of_range);
  EXPECT_THROW(precompute(script_of(AdversaryKind::fixed), 1000, 1024), std::length_error);
}

TEST(Adversary, DeskScaleSequenceFitsCap) {
  const std::size_t bytes = sequence_bytes(k42, 20000);
  EXPECT_LT(bytes, kDefaultSequenceMemoryCap / 100);
  const auto seq = precompute(script_of(AdversaryKind::random_smoothed), 20000);
  EXPECT_EQ(seq.horizon(), 20000u);
  EXPECT_EQ(seq.prefix(123).horizon(), 123u);
  EXPECT_EQ(seq.prefix(123).model(123), seq.model(123));
}

TEST(Adversary, EveryEmittedModelContractsByOneMinusGamma) {
  const auto policies = enumerate_deterministic_policies(k42);
  RandomStream pick(5);
  for (auto kind : kSmoothedKinds) {
    const auto seq = precompute(script_of(kind), 2000);
    for (int i = 0; i < 100; ++i) {
      const std::size_t t = 1 + static_cast<std::size_t>(pick.uniform() * 2000);
      for (double v : seq.loss(t).data()) ASSERT_TRUE(v >= 0.0 && v <= 1.0);
      for (const auto& pi : policies) {
        ASSERT_LE(contraction_coefficient(induce_transition_matrix(pi, seq.model(t))), 0.75 + 1e-12);
      }
    }
  }
}

TEST(Adversary, LeaderPunisherReplaysIdentically) {
  const auto s = script_of(AdversaryKind::leader_punisher, 9, 20);
  const auto long_run = precompute(s, 300);
  const auto short_run = precompute(s, 150);
  for (std::size_t t = 1; t <= 150; ++t) EXPECT_EQ(long_run.loss(t), short_run.loss(t));
  // Punished action pairs carry loss 1.
  std::size_t ones = 0;
  for (double v : long_run.loss(1).data()) ones += v == 1.0;
  EXPECT_GE(ones, 4u);
}

TEST(Adversary, ScriptedCyclesSuppliedModels) {
  auto s = script_of(AdversaryKind::scripted);
  const auto a = TransitionModel::uniform(k42);
  RandomStream rng(1);
  const auto b = random_model(k42, rng);
  s.scripted_models = std::make_shared<const std::vector<TransitionModel>>(std::vector{a, b});
  s.scripted_losses = std::make_shared<const std::vector<LossFunction>>(
      std::vector{LossFunction::constant(k42, 0.5)});
  const auto seq = precompute(s, 5);
  EXPECT_EQ(seq.model(1), a);
  EXPECT_EQ(seq.model(2), b);
  EXPECT_EQ(seq.model(5), a);
  EXPECT_EQ(distinct_models(seq).size(), 2u);
}

TEST(Adversary, ValidationErrors) {
  auto s = script_of(AdversaryKind::fixed);
  s.gamma = 0.0;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s.gamma = 0.25;
  s.period = 0;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  auto scripted = script_of(AdversaryKind::scripted);
  EXPECT_THROW(scripted.validate(), std::invalid_argument);
}

TEST(Adversary, DescriptorNamesKindAndSeed) {
  const auto d = script_of(AdversaryKind::model_switching, 42).describe();
  EXPECT_NE(d.find("model-switching"), std::string::npos);
  EXPECT_NE(d.find("42"), std::string::npos);
}

TEST(ExpertStreams, ShapesRangesAndDeterminism) {
  for (auto kind : {ExpertStreamKind::fixed_gap, ExpertStreamKind::phase_shifted_punisher,
                    ExpertStreamKind::random}) {
    EXPECT_EQ(parse_expert_stream_kind(to_string(kind)), kind);
    const ExpertStreamScript s{kind, 5, 3, 0.1, 4};
    const auto a = expert_losses(s, 200);
    ASSERT_EQ(a.size(), 200u);
    for (const auto& row : a) {
      ASSERT_EQ(row.size(), 5u);
      for (double v : row) ASSERT_TRUE(v >= 0.0 && v <= 1.0);
    }
    EXPECT_EQ(a, expert_losses(s, 200));
  }
}

TEST(ExpertStreams, FixedGapFavoursLastExpert) {
  const auto a = expert_losses({ExpertStreamKind::fixed_gap, 4, 1, 0.2, 1}, 20000);
  std::vector<double> totals(4, 0.0);
  for (const auto& row : a)
    for (std::size_t i = 0; i < 4; ++i) totals[i] += row[i];
  EXPECT_NEAR(totals[3] / 20000, 0.3, 0.02);
  EXPECT_NEAR(totals[0] / 20000, 0.5, 0.02);
}

TEST(ExpertStreams, PunisherHitsCurrentLeader) {
  const auto a = expert_losses({ExpertStreamKind::phase_shifted_punisher, 3, 0, 0.1, 2}, 12);
  std::vector<double> cumulative(3, 0.0);
  for (std::size_t t = 0; t < 12; ++t) {
    std::size_t hit = 0;
    for (std::size_t i = 0; i < 3; ++i) if (a[t][i] == 1.0) hit = i;
    if (t % 2 == 0) {
      const auto leader = std::min_element(cumulative.begin(), cumulative.end()) - cumulative.begin();
      EXPECT_EQ(hit, static_cast<std::size_t>(leader));
    } else {
      EXPECT_EQ(a[t], a[t - 1]);
    }
    for (std::size_t i = 0; i < 3; ++i) cumulative[i] += a[t][i];
  }
}
