// Copyright 2026 The wmbound Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "wmbound/policy.h"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "test_util.h"
#include "wmbound/status.h"

namespace wmbound {
namespace {

constexpr double kLog36 = 3.583518938456110;
constexpr double kLog3 = 1.098612288668110;
constexpr double kLog2 = 0.693147180559945;

struct TwoAtoms {
  SupportPtr universe = Support::Indexed(2);
  FiniteDistribution base = FiniteDistribution::Uniform(universe);
  WatermarkPlan plan =
      BuildPlan(base, StateSet::Of(universe, std::vector<StateId>{0}), 0.25);
};

// F proportional to U(1, 2) weights, a random region and a random interior beta.
WatermarkPlan RandomInteriorPlan(Rng& rng, std::size_t k) {
  const auto f = testing::RandomDistribution(rng, k, 1.0, 2.0);
  const auto s = testing::RandomProperSubset(rng, f.universe_ptr());
  const double alpha = MassOf(f, s);
  const double beta = (1.0 - alpha) * (0.05 + 0.9 * UniformDouble(rng));
  return BuildPlan(f, s, beta);
}

std::vector<double> RandomLogits(Rng& rng, std::size_t k) {
  std::vector<double> v(k);
  for (double& x : v) x = 4.0 * UniformDouble(rng) - 2.0;
  return v;
}

TEST(RewardCoefficientTest, Examples) {
  EXPECT_NEAR(RewardCoefficient(ErrorRates::Make(0.2, 0.1)), kLog36, 1e-14);
  EXPECT_EQ(RewardCoefficient(ErrorRates::Make(0.5, 0.5)), 0.0);
  EXPECT_NEAR(RewardCoefficient(ErrorRates::Make(0.5, 0.25)), kLog3, 1e-15);
}

TEST(RewardCoefficientTest, DegenerateRates) {
  for (auto r : {ErrorRates{0.5, 0.0}, ErrorRates{0.0, 0.5}, ErrorRates{1.0, 0.0},
                 ErrorRates{0.0, 1.0}}) {
    try {
      RewardCoefficient(r);
      FAIL() << r.alpha << ' ' << r.beta;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kDegenerate);
      EXPECT_NE(std::string(e.what()).find("rejection"), std::string::npos);
    }
  }
}

TEST(ObjectiveTest, AtBaseIsExpectedReward) {
  TwoAtoms t;
  const auto reward = WatermarkReward(t.plan);
  EXPECT_NEAR(Objective(SoftmaxPolicy::AtBase(t.base), t.base, reward),
              reward.coefficient * t.plan.alpha(), 1e-15);
}

TEST(ObjectiveTest, AtOptimumIsLogTwo) {
  TwoAtoms t;
  const auto reward = WatermarkReward(t.plan);
  const double at_opt = Objective(OptimalDistribution(t.plan), t.base, reward);
  EXPECT_NEAR(at_opt, kLog2, 1e-15);
  EXPECT_NEAR(at_opt, kLog3 * 0.75 - KlLowerBound(t.plan.rates()).value(), 1e-15);
}

TEST(GibbsSolutionTest, ZeroRewardReturnsBase) {
  Rng rng(3);
  const auto f = testing::RandomDistribution(rng, 20);
  const RewardSpec zero{0.0, StateSet::Empty(f.universe_ptr()), 0.0};
  const auto g = GibbsSolution(f, zero);
  for (StateId id = 0; id < 20; ++id) EXPECT_NEAR(g.mass(id), f.mass(id), 1e-15);
}

TEST(GibbsSolutionTest, TwoAtomTilt) {
  TwoAtoms t;
  const auto g = GibbsSolution(t.base, WatermarkReward(t.plan));
  EXPECT_NEAR(g.mass(0), 0.75, 1e-15);
  EXPECT_NEAR(g.mass(1), 0.25, 1e-15);
}

TEST(GibbsSolutionTest, MatchesOptimalDistributionAndValue) {
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    const auto plan = RandomInteriorPlan(rng, 2 + testing::UniformIndex(rng, 0, 300));
    const auto reward = WatermarkReward(plan);
    const auto gibbs = GibbsSolution(plan.base(), reward);
    ASSERT_LE(TotalVariation(gibbs, OptimalDistribution(plan)), 1e-12);
    const double j = Objective(gibbs, plan.base(), reward);
    const double closed = std::log((1 - plan.alpha()) / plan.beta());
    ASSERT_NEAR(j, closed, 1e-10);
    ASSERT_NEAR(reward.coefficient * (1 - plan.beta()) -
                    KlLowerBound(plan.rates()).value(),
                closed, 1e-10);
  }
}

TEST(ObjectiveGradientTest, MatchesCentralDifferences) {
  Rng rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const auto plan = RandomInteriorPlan(rng, 10);
    const auto reward = WatermarkReward(plan);
    SoftmaxPolicy pi(plan.base(), RandomLogits(rng, 10));
    const auto grad = ObjectiveGradient(pi, plan.base(), reward);
    const double h = 1e-5;
    std::vector<double> fd(10);
    double err = 0.0, scale = 0.0;
    for (std::size_t j = 0; j < 10; ++j) {
      std::vector<double> up(pi.logits().begin(), pi.logits().end());
      std::vector<double> down = up;
      up[j] += h;
      down[j] -= h;
      fd[j] = (Objective(SoftmaxPolicy(plan.base(), up), plan.base(), reward) -
               Objective(SoftmaxPolicy(plan.base(), down), plan.base(), reward)) /
              (2 * h);
      err = std::max(err, std::abs(fd[j] - grad[j]));
      scale = std::max(scale, std::abs(grad[j]));
    }
    EXPECT_LE(err / scale, 1e-6) << "trial " << trial;
  }
}

TEST(ObjectiveGradientTest, VanishesAtGibbsSolution) {
  Rng rng(9);
  for (int i = 0; i < 20; ++i) {
    const auto plan = RandomInteriorPlan(rng, 50);
    const auto reward = WatermarkReward(plan);
    const auto gibbs = GibbsSolution(plan.base(), reward);
    std::vector<double> logits;
    for (StateId id : plan.base().support()) logits.push_back(gibbs.log_mass(id));
    const auto grad =
        ObjectiveGradient(SoftmaxPolicy(plan.base(), logits), plan.base(), reward);
    for (double g : grad) ASSERT_LE(std::abs(g), 1e-8);
  }
}

TEST(ObjectiveGradientTest, RewardOffsetShiftsValueOnly) {
  Rng rng(11);
  const auto plan = RandomInteriorPlan(rng, 30);
  auto reward = WatermarkReward(plan);
  auto shifted = reward;
  shifted.offset = 2.5;
  SoftmaxPolicy pi(plan.base(), RandomLogits(rng, 30));
  EXPECT_NEAR(Objective(pi, plan.base(), shifted),
              Objective(pi, plan.base(), reward) + 2.5, 1e-12);
  const auto g0 = ObjectiveGradient(pi, plan.base(), reward);
  const auto g1 = ObjectiveGradient(pi, plan.base(), shifted);
  for (std::size_t i = 0; i < g0.size(); ++i) EXPECT_NEAR(g0[i], g1[i], 1e-12);

  TrainConfig cfg;
  cfg.max_iters = 50;
  const auto a = Train(plan.base(), reward, cfg);
  const auto b = Train(plan.base(), shifted, cfg);
  for (std::size_t i = 0; i < 30; ++i) {
    EXPECT_NEAR(a.first.logits()[i], b.first.logits()[i], 1e-10);
  }
}

TEST(ObjectiveTest, ConcaveAlongMixtures) {
  Rng rng(13);
  for (int i = 0; i < 200; ++i) {
    const auto plan = RandomInteriorPlan(rng, 2 + testing::UniformIndex(rng, 0, 60));
    const auto reward = WatermarkReward(plan);
    const auto& u = plan.base().universe_ptr();
    const auto p0 = testing::RandomOn(rng, u);
    const auto p1 = testing::RandomOn(rng, u);
    const double lambda = UniformDouble(rng);
    std::vector<double> mix(u->size());
    for (StateId id = 0; id < mix.size(); ++id) {
      mix[id] = lambda * p0.mass(id) + (1 - lambda) * p1.mass(id);
    }
    const auto pm = FiniteDistribution::FromWeights(u, mix);
    ASSERT_GE(Objective(pm, plan.base(), reward),
              lambda * Objective(p0, plan.base(), reward) +
                  (1 - lambda) * Objective(p1, plan.base(), reward) - 1e-9);
  }
}

TEST(TrainTest, RecoversOptimumOnHundredStates) {
  Rng rng(17);
  for (int i = 0; i < 5; ++i) {
    const auto plan = RandomInteriorPlan(rng, 100);
    const auto reward = WatermarkReward(plan);
    const auto [pi, report] = Train(plan.base(), reward, TrainConfig{});
    EXPECT_TRUE(report.converged);
    EXPECT_LE(report.iterations, 5000);
    EXPECT_LE(report.kl_to_target, 1e-8);
    EXPECT_NEAR(report.final_objective, std::log((1 - plan.alpha()) / plan.beta()), 1e-8);
    EXPECT_LE(FDivergence(pi.Distribution(), OptimalDistribution(plan),
                          FGenerator::KullbackLeibler()),
              1e-8);
  }
}

TEST(TrainTest, ZeroRewardConvergesImmediately) {
  Rng rng(19);
  const auto f = testing::RandomDistribution(rng, 25);
  const RewardSpec zero{0.0, StateSet::Empty(f.universe_ptr()), 0.0};
  const auto [pi, report] = Train(f, zero, TrainConfig{});
  EXPECT_TRUE(report.converged);
  EXPECT_EQ(report.iterations, 0);
  EXPECT_LE(TotalVariation(pi.Distribution(), f), 1e-15);
}

TEST(TrainTest, NonConvergenceIsReported) {
  Rng rng(23);
  const auto plan = RandomInteriorPlan(rng, 100);
  TrainConfig cfg;
  cfg.max_iters = 3;
  const auto [pi, report] = Train(plan.base(), WatermarkReward(plan), cfg);
  EXPECT_FALSE(report.converged);
  EXPECT_EQ(report.iterations, 3);
  const auto j = ReportToJson(report, cfg);
  EXPECT_EQ(j["converged"], false);
  EXPECT_EQ(j["config"]["max_iters"], 3);
}

TEST(TrainTest, NonFiniteStepIsANumericError) {
  Rng rng(29);
  const auto plan = RandomInteriorPlan(rng, 10);
  TrainConfig cfg;
  cfg.learning_rate = std::numeric_limits<double>::infinity();
  try {
    Train(plan.base(), WatermarkReward(plan), cfg);
    FAIL() << "expected numeric error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNumeric);
  }
}

TEST(SoftmaxPolicyTest, ProbabilitiesNormalizeAndStayPositive) {
  Rng rng(31);
  const auto f = testing::RandomDistribution(rng, 40);
  SoftmaxPolicy pi(f, RandomLogits(rng, 40));
  const auto d = pi.Distribution();
  EXPECT_NEAR(Sum(d.dense_masses()), 1.0, 1e-12);
  EXPECT_EQ(d.support().size(), 40u);
  EXPECT_THROW(pi.set_logits(std::vector<double>(40, NAN)), Error);
  const auto j = PolicyToJson(pi);
  EXPECT_EQ(j["logits"].size(), 40u);
  EXPECT_EQ(j["support_ids"].size(), 40u);
}

}  // namespace
}  // namespace wmbound
