#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "omdp/harness.hpp"
#include "omdp/mixing.hpp"
#include "omdp/sd_mdp.hpp"
#include "oracles.hpp"

using namespace omdp;

TEST(SdMdpInit, LearningRateAndInitialDistributions) {
  const ProblemShape shape{4, 2};
  SdMdpLearner learner(enumerate_deterministic_policies(shape), shape, 20000, 2);
  EXPECT_NEAR(learner.eta(), std::sqrt(std::log(16.0) / 20000), 1e-15);
  EXPECT_NEAR(learner.eta(), 0.011775, 1e-6);
  for (std::size_t i = 0; i < 16; ++i) {
    const auto d = learner.policy_distribution(i);
    for (std::size_t x = 0; x < 4; ++x) EXPECT_EQ(d[x], x == 2 ? 1.0 : 0.0);
  }
  for (double q : learner.expert_state().distribution()) EXPECT_EQ(q, 1.0 / 16);
}

TEST(SdMdpInit, RejectsBadArguments) {
  const ProblemShape shape{2, 2};
  EXPECT_THROW(SdMdpLearner(std::vector<Policy>{}, shape, 10, 0), std::invalid_argument);
  EXPECT_THROW(SdMdpLearner(enumerate_deterministic_policies(shape), shape, 10, 2), std::out_of_range);
  EXPECT_THROW(SdMdpLearner(enumerate_deterministic_policies({3, 2}), shape, 10, 0), ShapeMismatch);
}

TEST(SdMdpChoose, RoundOneIsUniformOverClass) {
  const ProblemShape shape{2, 2};
  const auto policies = std::make_shared<const std::vector<Policy>>(enumerate_deterministic_policies(shape));
  std::vector<std::size_t> counts(4, 0);
  const std::size_t runs = 40000;
  for (std::size_t r = 0; r < runs; ++r) {
    SdMdpLearner learner(policies, shape, 10, 0);
    RandomStream rng(r);
    ++counts[learner.choose_policy(rng).expert];
  }
  const double sigma = std::sqrt(runs * 0.25 * 0.75);
  for (auto c : counts) EXPECT_LT(std::fabs(c - runs * 0.25), 4 * sigma);
}

TEST(SdMdpObserve, ConstantLossShiftsUniformly) {
  const ProblemShape shape{3, 2};
  SdMdpLearner learner(enumerate_deterministic_policies(shape), shape, 100, 0);
  RandomStream rng(1);
  const auto m = smooth_model(random_model(shape, rng), 0.3);
  learner.choose_policy(rng);
  const auto c = learner.observe(m, LossFunction::constant(shape, 0.4));
  for (double v : c) EXPECT_NEAR(v, 0.4, 1e-15);
  for (double q : learner.expert_state().distribution()) EXPECT_NEAR(q, 1.0 / 8, 1e-15);
}

TEST(SdMdpObserve, FirstRoundCostsComeFromStartState) {
  const ProblemShape shape{3, 2};
  RandomStream rng(2);
  std::vector<double> lv(6);
  for (auto& v : lv) v = rng.uniform();
  const LossFunction loss(shape, lv);
  const auto policies = enumerate_deterministic_policies(shape);
  SdMdpLearner learner(policies, shape, 10, 1);
  learner.choose_policy(rng);
  const auto c = learner.observe(TransitionModel::uniform(shape), loss);
  for (std::size_t i = 0; i < policies.size(); ++i) {
    std::size_t a = policies[i](1, 0) == 1.0 ? 0 : 1;
    EXPECT_EQ(c[i], loss(1, a));
  }
}

TEST(SdMdpObserve, LossesUseDistributionBeforePropagation) {
  using namespace fixture;
  const std::vector<Policy> policies{always(0), always(1)};
  SdMdpLearner learner(policies, kTwoByTwo, 2, 0);
  RandomStream rng(3);
  learner.choose_policy(rng);
  const auto c1 = learner.observe(stay_or_flip(), state_one_costs());
  EXPECT_EQ(c1[0], 0.0);
  EXPECT_EQ(c1[1], 0.0);
  learner.choose_policy(rng);
  const auto c2 = learner.observe(stay_or_flip(), state_one_costs());
  EXPECT_EQ(c2[0], 0.0);
  EXPECT_EQ(c2[1], 1.0);
}

TEST(SdMdpObserve, MatchesOracleCostsAndStaysOnSimplex) {
  const ProblemShape shape{3, 2};
  const AdversaryScript script{AdversaryKind::random_smoothed, shape, 4};
  const std::size_t T = 100000;
  const auto seq = precompute(script, T);
  const auto policies = enumerate_deterministic_policies(shape);
  SdMdpLearner learner(policies, shape, T, 0);
  RandomStream rng(5);
  const auto ref0 = oracle::policy_costs(policies[3], seq.prefix(200), 0);
  for (std::size_t t = 1; t <= T; ++t) {
    learner.choose_policy(rng);
    const auto c = learner.observe(seq.model(t), seq.loss(t));
    if (t <= 200) ASSERT_NEAR(c[3], ref0[t - 1], 1e-13);
    for (double v : c) ASSERT_TRUE(v >= 0.0 && v <= 1.0);
  }
  for (std::size_t i = 0; i < policies.size(); ++i) {
    double s = 0.0;
    for (double v : learner.policy_distribution(i)) {
      ASSERT_GE(v, 0.0);
      s += v;
    }
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

TEST(SdMdpObserve, ShapeMismatchThrows) {
  SdMdpLearner learner(enumerate_deterministic_policies({2, 2}), {2, 2}, 5, 0);
  EXPECT_THROW(learner.observe(TransitionModel::uniform({3, 2}), LossFunction::constant({2, 2}, 0)),
               ShapeMismatch);
}

TEST(SdMdpCounterfactual, ExpectedTotalsMatchSampledTrajectories) {
  const auto seq = fixture::two_state_sequence(50);
  const Policy pi(fixture::kTwoByTwo, {0.7, 0.3, 0.4, 0.6});
  const auto expected = oracle::policy_costs(pi, seq, 0);
  double exact = 0.0;
  for (double v : expected) exact += v;
  EXPECT_NEAR(policy_sequence_expected_loss(std::vector<Policy>{pi}, std::vector<std::size_t>(50, 0),
                                            seq, 0),
              exact, 1e-12);
  RandomStream rng(6);
  std::vector<double> samples;
  for (int i = 0; i < 10000; ++i) samples.push_back(sampled_policy_loss(pi, seq, 0, rng));
  const auto stats = sample_stats(samples);
  EXPECT_LT(std::fabs(stats.mean - exact), 3 * stats.standard_error);
}

TEST(SdMdpSwitching, PolicyDriftBoundedByTwiceSwitches) {
  const ProblemShape shape{3, 2};
  const AdversaryScript script{AdversaryKind::random_smoothed, shape, 7};
  const std::size_t T = 3000;
  const auto seq = precompute(script, T);
  const auto policies = enumerate_deterministic_policies(shape);
  SdMdpLearner learner(policies, shape, T, 0);
  RandomStream rng(8);
  std::vector<std::size_t> chosen;
  std::vector<int> switched;
  for (std::size_t t = 1; t <= T; ++t) {
    const auto c = learner.choose_policy(rng);
    chosen.push_back(c.expert);
    switched.push_back(c.switched ? 1 : 0);
    learner.observe(seq.model(t), seq.loss(t));
  }
  for (std::size_t t = 0; t < T; t += 7) {
    int switches = 0;
    for (std::size_t k = 1; k <= 40 && k <= t; ++k) {
      switches += switched[t - k + 1];
      ASSERT_LE(policy_distance(policies[chosen[t - k]], policies[chosen[t]]), 2.0 * switches + 1e-15);
    }
  }
}

TEST(SdMdpRule, ParseAndPrint) {
  EXPECT_EQ(parse_update_rule("sd-mdp"), UpdateRule::shrinking_dartboard);
  EXPECT_EQ(parse_update_rule("ewa-mdp"), UpdateRule::exponential_weights);
  EXPECT_FALSE(parse_update_rule("sd"));
  EXPECT_EQ(to_string(UpdateRule::exponential_weights), "ewa-mdp");
}

TEST(SdMdpRule, EwaBaselineSwitchesMoreOften) {
  const ProblemShape shape{3, 2};
  const AdversaryScript script{AdversaryKind::random_smoothed, shape, 9};
  const std::size_t T = 2000;
  const auto seq = precompute(script, T);
  const auto policies = std::make_shared<const std::vector<Policy>>(enumerate_deterministic_policies(shape));
  SdMdpLearner sd(policies, shape, T, 0), ewa(policies, shape, T, 0, UpdateRule::exponential_weights);
  RandomStream r1(10), r2(10);
  const auto t1 = run_game(sd, seq, r1);
  const auto t2 = run_game(ewa, seq, r2);
  EXPECT_LT(t1.switch_count * 5, t2.switch_count);
}
