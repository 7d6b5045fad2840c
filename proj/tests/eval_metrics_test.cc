// Copyright 2026 DeepMind Technologies Limited
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

#include "csro/eval_metrics.h"

#include <cmath>

#include "csro/cfr.h"
#include "csro/populations.h"
#include "gtest/gtest.h"

namespace csro {
namespace {

PolicyHandle Rrps(const std::string& name) {
  return FindBot(GameId::kRrps, name)->factory();
}

std::vector<PolicyHandle> Population() {
  std::vector<PolicyHandle> out;
  for (const auto& d : RrpsPopulation()) out.push_back(d.factory());
  return out;
}

TEST(MetricsTest, AggScoreIdentities) {
  // Published table rows subtract exactly.
  EXPECT_EQ(AggScore(193.2, 67.2), 126.0);
  EXPECT_EQ(AggScore(50.5, 25.2), 25.3);
  EXPECT_NEAR(AggScore(50.5, 25.2), 25.4, 0.1 + 1e-12);
  EXPECT_EQ(AggScore(0, 0), 0);
  EXPECT_EQ(AggScore(-3, 7), -10);
  EXPECT_EQ(AggScore(0.1, 0.3), -0.2);
}

TEST(MetricsTest, AggScoreMatchesBinarySubtraction) {
  Rng rng(1);
  for (int i = 0; i < 10000; ++i) {
    const double a = (rng.UniformReal() - 0.5) * std::pow(10, rng.UniformInt(8));
    const double b = (rng.UniformReal() - 0.5) * std::pow(10, rng.UniformInt(8));
    const double d = AggScore(a, b);
    EXPECT_NEAR(d, a - b, 1e-13 * (std::abs(a) + std::abs(b))) << a << " " << b;
  }
  EXPECT_EQ(AggScore(1e300, 1e-300), 1e300);
  EXPECT_TRUE(std::isinf(AggScore(1, -std::numeric_limits<double>::infinity())));
}

TEST(MetricsTest, PopReturnAndPopExpl) {
  EXPECT_EQ(PopReturn({1, -1}), 0);
  EXPECT_EQ(PopExpl({10, 3}), -3);
  EXPECT_EQ(PopExpl({5, -7}), 7);
  EXPECT_THROW(PopReturn({}), std::invalid_argument);
  EXPECT_THROW(PopExpl({}), std::invalid_argument);
}

TEST(MetricsTest, AddingOpponentsProperties) {
  Rng rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> means;
    const int n = 1 + rng.UniformInt(8);
    for (int i = 0; i < n; ++i) means.push_back(rng.UniformReal() * 200 - 100);
    const double r = PopReturn(means);
    const double e = PopExpl(means);
    // An opponent beaten by more than the current average raises PopReturn.
    auto more = means;
    more.push_back(r + 1 + rng.UniformReal() * 50);
    EXPECT_GT(PopReturn(more), r);
    // One beaten at least as badly as the current worst leaves PopExpl alone.
    auto same = means;
    same.push_back(-e + rng.UniformReal() * 10);
    EXPECT_EQ(PopExpl(same), e);
    // AggScore is bounded by PopReturn plus the best mean.
    EXPECT_LE(AggScore(r, e),
              r + *std::max_element(means.begin(), means.end()) + 1e-9);
  }
}

TEST(EvalReportTest, ConsistencyAndSerialization) {
  EvalReport rep;
  rep.agent_id = "x";
  rep.per_opponent["b"] = {193.2 + 67.2, 1, 20};
  rep.per_opponent["a"] = {-67.2, 2, 20};
  rep.Finalize();
  EXPECT_EQ(rep.CheckConsistency(), "");
  EXPECT_EQ(rep.pop_expl, 67.2);
  EXPECT_EQ(rep.ToCsv(),
            "opponent,mean_return\na,-67.2\nb,260.4\nPopReturn,96.6\n"
            "PopExpl,67.2\nAggScore,29.4\n");
  const auto back = EvalReport::FromJson(Json::parse(rep.ToJson().dump()));
  EXPECT_EQ(back.ToJson().dump(), rep.ToJson().dump());
  EXPECT_EQ(back.CheckConsistency(), "");
  rep.pop_return += 1e-9;
  EXPECT_NE(rep.CheckConsistency(), "");
}

TEST(EvaluateTest, PaperAgainstRock) {
  const auto rep = EvaluateAgainstPopulation(Rrps("paperbot"), {Rrps("rockbot")},
                                             RepeatedGameSpec::Rrps(), 4, 1);
  EXPECT_EQ(rep.pop_return, 1000);
  EXPECT_EQ(rep.pop_expl, -1000);
  EXPECT_EQ(rep.agg_score, 2000);
  EXPECT_EQ(rep.per_opponent.at("rockbot").episodes, 4);
}

TEST(EvaluateTest, RandbotIsUnexploitable) {
  const auto pop = Population();
  const auto rep = EvaluateAgainstPopulation(Rrps("randbot"), pop,
                                             RepeatedGameSpec::Rrps(), 20, 7);
  ASSERT_EQ(rep.per_opponent.size(), pop.size());
  EXPECT_EQ(rep.CheckConsistency(), "");
  double var = 0;
  for (const auto& [id, r] : rep.per_opponent) var += r.std_err * r.std_err;
  const double pooled = std::sqrt(var) / pop.size();
  EXPECT_LE(std::abs(rep.pop_return), 3 * pooled);
}

TEST(EvaluateTest, ScheduleIndependent) {
  const auto pop = Population();
  const auto spec = RepeatedGameSpec::Rrps(200);
  const auto a = EvaluateAgainstPopulation(Rrps("markov5"), pop, spec, 4, 3, 1);
  const auto b = EvaluateAgainstPopulation(Rrps("markov5"), pop, spec, 4, 3, 4);
  EXPECT_EQ(a.ToJson().dump(), b.ToJson().dump());
}

TEST(EvaluateTest, CfrIsUnexploitedByHeuristics) {
  const auto cfr = cfr::AsPolicy(cfr::CfrPlusSolve(2000, leduc::StakeMode::kAnte));
  std::vector<PolicyHandle> pop = {cfr.WithId("cfr_opponent")};
  for (const auto& d : LeducHeuristics()) pop.push_back(d.factory());
  const auto rep =
      EvaluateAgainstPopulation(cfr, pop, RepeatedGameSpec::Leduc(), 60, 5);
  EXPECT_EQ(rep.CheckConsistency(), "");
  // The minimum is the self-play entry, which is zero in expectation.
  const auto& self = rep.per_opponent.at("cfr_opponent");
  EXPECT_LE(std::abs(rep.pop_expl), 3 * self.std_err);
  EXPECT_GT(rep.per_opponent.at("AlwaysCall").mean, 0);
  EXPECT_GT(rep.per_opponent.at("AlwaysFold").mean, 0);
}

TEST(EvaluateTest, FailuresNameTheOpponent) {
  const PolicyHandle broken("broken", GameId::kRrps, PolicyKind::kNative,
                            [](uint64_t) -> std::unique_ptr<Agent> {
                              struct Banana : Agent {
                                std::string Act(const Observation&) override {
                                  return "BANANA";
                                }
                              };
                              return std::make_unique<Banana>();
                            });
  try {
    EvaluateAgainstPopulation(Rrps("rockbot"), {Rrps("paperbot"), broken},
                              RepeatedGameSpec::Rrps(), 2, 1);
    FAIL();
  } catch (const PopulationEvalError& e) {
    EXPECT_EQ(e.opponent(), "broken");
  }
  EXPECT_THROW(EvaluateAgainstPopulation(Rrps("rockbot"), {},
                                         RepeatedGameSpec::Rrps()),
               std::invalid_argument);
  EXPECT_THROW(EvaluateAgainstPopulation(Rrps("rockbot"),
                                         {Rrps("paperbot"), Rrps("paperbot")},
                                         RepeatedGameSpec::Rrps()),
               std::invalid_argument);
}

TEST(MixturePolicyTest, DrawsMembersByWeight) {
  const auto mix = MixturePolicy("mix", {Rrps("rockbot"), Rrps("paperbot")},
                                 {0.25, 0.75});
  int paper = 0;
  const auto spec = RepeatedGameSpec::Rrps(5);
  for (uint64_t s = 0; s < 2000; ++s) {
    paper += PlayMatch(spec, mix, Rrps("rockbot"), s).returns[0] == 5;
  }
  EXPECT_NEAR(paper / 2000.0, 0.75, 0.04);
  EXPECT_THROW(MixturePolicy("m", {Rrps("rockbot")}, {0.5, 0.5}),
               std::invalid_argument);
  EXPECT_THROW(MixturePolicy("m", {Rrps("rockbot")}, {0}), std::invalid_argument);
}

}  // namespace
}  // namespace csro
