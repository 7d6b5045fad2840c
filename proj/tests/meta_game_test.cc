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

#include <cmath>

#include "csro/meta_game.h"
#include "csro/populations.h"
#include "gtest/gtest.h"
#include "lp_oracle.h"

namespace csro {
namespace {

PolicyHandle Rrps(const std::string& name) {
  return FindBot(GameId::kRrps, name)->factory();
}

Eigen::MatrixXd RandomAntisymmetric(int n, Rng& rng, bool integer) {
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double x = integer ? rng.UniformInt(5) - 2.0
                               : 2 * rng.UniformReal() - 1;
      u(i, j) = x;
      u(j, i) = -x;
    }
  }
  return u;
}

std::vector<std::vector<double>> Rows(const Eigen::MatrixXd& u) {
  std::vector<std::vector<double>> rows(u.rows(), std::vector<double>(u.cols()));
  for (int i = 0; i < u.rows(); ++i) {
    for (int j = 0; j < u.cols(); ++j) rows[i][j] = u(i, j);
  }
  return rows;
}

Eigen::MatrixXd Rps() {
  Eigen::MatrixXd u(3, 3);
  // Rock, paper, scissors rows.
  u << 0, -1, 1, 1, 0, -1, -1, 1, 0;
  return u;
}

TEST(PayoffMatrixTest, DeterministicPair) {
  PayoffOptions opts;
  opts.episodes_per_pair = 4;
  const auto m = ComputePayoffMatrix({Rrps("rockbot"), Rrps("paperbot")},
                                     RepeatedGameSpec::Rrps(), opts);
  EXPECT_EQ(m.values(1, 0), 1000);
  EXPECT_EQ(m.values(0, 1), -1000);
  EXPECT_EQ(m.std_err(0, 1), 0);
  EXPECT_EQ(m.ToCsv(), "policy,rockbot,paperbot\nrockbot,0,-1000\npaperbot,1000,0\n");
}

TEST(PayoffMatrixTest, SinglePolicyIsZero) {
  const auto m = ComputePayoffMatrix({Rrps("randbot")}, RepeatedGameSpec::Rrps(), {});
  ASSERT_EQ(m.size(), 1);
  EXPECT_EQ(m.values(0, 0), 0);
}

TEST(PayoffMatrixTest, AntisymmetricWithExpectedStdErr) {
  PayoffOptions opts;
  opts.episodes_per_pair = 50;
  opts.seed = 3;
  const auto m = ComputePayoffMatrix(
      {Rrps("rockbot"), Rrps("copybot"), Rrps("randbot")}, RepeatedGameSpec::Rrps(),
      opts);
  EXPECT_EQ((m.values + m.values.transpose()).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(m.values.diagonal().cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(m.values(1, 0), 999);
  // randbot vs rockbot: each throw is +1/0/-1 with probability 1/3, so one
  // 1000-throw match has variance 1000 * 2/3.
  const double expected = std::sqrt(1000.0 * 2.0 / 3.0) / std::sqrt(50.0);
  EXPECT_NEAR(m.std_err(2, 0), expected, 0.25 * expected);
  EXPECT_EQ(m.std_err(2, 0), m.std_err(0, 2));
}

TEST(PayoffMatrixTest, IncrementalEqualsFullAndScheduleFree) {
  const std::vector<PolicyHandle> bank = {Rrps("randbot"), Rrps("markov5"),
                                          Rrps("switchbot"), Rrps("flatbot3")};
  PayoffOptions opts;
  opts.episodes_per_pair = 6;
  opts.seed = 11;
  opts.threads = 1;
  const auto spec = RepeatedGameSpec::Rrps(300);
  const auto full = ComputePayoffMatrix(bank, spec, opts);
  const auto part = ComputePayoffMatrix({bank[0], bank[1], bank[2]}, spec, opts);
  opts.threads = 4;
  const auto grown = ComputePayoffMatrix(bank, spec, opts, &part);
  EXPECT_EQ(full.values, grown.values);
  EXPECT_EQ(full.std_err, grown.std_err);
  EXPECT_EQ(full.ToJson().dump(), grown.ToJson().dump());
  // A previous matrix with different settings is not reused.
  PayoffMatrix stale = part;
  stale.values(0, 1) = 12345;
  stale.values(1, 0) = -12345;
  stale.episodes_per_pair = 7;
  EXPECT_EQ(ComputePayoffMatrix(bank, spec, opts, &stale).values, full.values);
}

TEST(PayoffMatrixTest, RejectsBadInput) {
  EXPECT_THROW(ComputePayoffMatrix({}, RepeatedGameSpec::Rrps(), {}),
               std::invalid_argument);
  PayoffOptions opts;
  opts.episodes_per_pair = 0;
  EXPECT_THROW(ComputePayoffMatrix({Rrps("rockbot")}, RepeatedGameSpec::Rrps(), opts),
               std::invalid_argument);
}

TEST(PayoffMatrixTest, MatchFailureNamesThePair) {
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
    ComputePayoffMatrix({Rrps("rockbot"), broken}, RepeatedGameSpec::Rrps(), {});
    FAIL();
  } catch (const PayoffError& e) {
    EXPECT_EQ(e.row(), 0);
    EXPECT_EQ(e.col(), 1);
    EXPECT_NE(std::string(e.what()).find("broken"), std::string::npos);
  }
}

TEST(MetaNashConvTest, Examples) {
  EXPECT_NEAR(MetaNashConv(Eigen::Vector3d::Constant(1.0 / 3), Rps()), 0, 1e-15);
  Eigen::MatrixXd u(2, 2);
  u << 0, 1, -1, 0;
  EXPECT_EQ(MetaNashConv(Eigen::Vector2d(0, 1), u), 1);
  EXPECT_EQ(MetaNashConv(Eigen::Vector2d(1, 0), u), 0);
  EXPECT_THROW(MetaNashConv(Eigen::Vector3d(1, 0, 0), u), std::invalid_argument);
  Rng rng(1);
  for (int k = 0; k < 50; ++k) {
    const auto m = RandomAntisymmetric(5, rng, false);
    Eigen::VectorXd p(5);
    for (int i = 0; i < 5; ++i) p[i] = rng.UniformReal();
    EXPECT_GE(MetaNashConv(p / p.sum(), m), 0);
  }
}

TEST(MetaSolverTest, RockPaperScissorsIsUniform) {
  const Eigen::VectorXd s = SolveSymmetricZeroSum(Rps());
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(s[i], 1.0 / 3, 1e-3);
}

TEST(MetaSolverTest, DominantRowIsPure) {
  Eigen::MatrixXd u(2, 2);
  u << 0, 1, -1, 0;
  const Eigen::VectorXd s = SolveSymmetricZeroSum(u);
  EXPECT_EQ(s[0], 1);
  EXPECT_EQ(s[1], 0);
}

TEST(MetaSolverTest, RejectsNonAntisymmetric) {
  Eigen::MatrixXd u(2, 2);
  u << 0, 1, 1, 0;
  EXPECT_THROW(SolveSymmetricZeroSum(u), std::invalid_argument);
}

TEST(MetaSolverTest, ZeroMatrixAndSingleton) {
  EXPECT_EQ(SolveSymmetricZeroSum(Eigen::MatrixXd::Zero(4, 4)),
            Eigen::VectorXd::Constant(4, 0.25));
  EXPECT_EQ(SolveSymmetricZeroSum(Eigen::MatrixXd::Zero(1, 1))[0], 1);
}

TEST(MetaSolverTest, CertificateAndLpAgreementOnRandomGames) {
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + rng.UniformInt(12);
    const bool integer = trial % 4 == 3;
    const Eigen::MatrixXd u = RandomAntisymmetric(n, rng, integer);
    const Eigen::VectorXd s = SolveSymmetricZeroSum(u);
    EXPECT_NEAR(s.sum(), 1, 1e-9);
    EXPECT_GE(s.minCoeff(), 0);
    for (int i = 0; i < n; ++i) EXPECT_TRUE(s[i] == 0 || s[i] >= 1e-9);
    EXPECT_LE(MetaNashConv(s, u), 1e-6) << "trial " << trial;
    const auto lp = testing::SolveMatrixGameLp(Rows(u));
    // The value of a symmetric zero-sum game is 0, and sigma guarantees it.
    EXPECT_NEAR(lp.value, 0, 1e-6);
    EXPECT_NEAR((s.transpose() * u).minCoeff(), lp.value, 1e-6);
  }
}

TEST(MetaSolverTest, Deterministic) {
  Rng rng(9);
  const Eigen::MatrixXd u = RandomAntisymmetric(9, rng, false);
  EXPECT_EQ(SolveSymmetricZeroSum(u), SolveSymmetricZeroSum(u));
}

TEST(MetaSolverTest, LpOracleSanity) {
  // Matching pennies shifted: value 0.5 with both sides uniform.
  const auto lp = testing::SolveMatrixGameLp({{1, 0}, {0, 1}});
  EXPECT_NEAR(lp.value, 0.5, 1e-12);
  EXPECT_NEAR(lp.column_strategy[0], 0.5, 1e-12);
}

TEST(MetaEquilibriumTest, WrapsIds) {
  PayoffMatrix m;
  m.bank_ids = {"r", "p", "s"};
  m.values = Rps();
  m.std_err = Eigen::MatrixXd::Zero(3, 3);
  const auto s = ComputeMetaEquilibrium(m);
  EXPECT_EQ(s.bank_ids, m.bank_ids);
  EXPECT_EQ(s.Support(), (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(s.ToJson()["bank_ids"].size(), 3u);
}

MetaStrategy Pure(const std::vector<std::string>& ids, int k) {
  MetaStrategy s;
  s.bank_ids = ids;
  s.probs = Eigen::VectorXd::Zero(ids.size());
  s.probs[k] = 1;
  return s;
}

TEST(EvaluatePolicyTest, Examples) {
  const std::vector<PolicyHandle> bank = {Rrps("rockbot"), Rrps("scissorsbot")};
  const std::vector<std::string> ids = {"rockbot", "scissorsbot"};
  const auto spec = RepeatedGameSpec::Rrps();
  EXPECT_EQ(EvaluatePolicy(Rrps("rockbot"), Pure(ids, 0), bank, spec, 4, 1).score, 0);
  const auto paper = EvaluatePolicy(Rrps("paperbot"), Pure(ids, 0), bank, spec, 4, 1);
  EXPECT_EQ(paper.score, 1000);
  ASSERT_EQ(paper.per_opponent.size(), 1u);
  EXPECT_EQ(paper.per_opponent[0].id, "rockbot");
}

TEST(EvaluatePolicyTest, LinearInSigma) {
  const std::vector<PolicyHandle> bank = {Rrps("markov5"), Rrps("driftbot")};
  const std::vector<std::string> ids = {"markov5", "driftbot"};
  const auto spec = RepeatedGameSpec::Rrps(300);
  const auto cand = Rrps("multibot");
  MetaStrategy mix;
  mix.bank_ids = ids;
  mix.probs = Eigen::Vector2d(0.5, 0.5);
  const double a = EvaluatePolicy(cand, Pure(ids, 0), bank, spec, 6, 5).score;
  const double b = EvaluatePolicy(cand, Pure(ids, 1), bank, spec, 6, 5).score;
  EXPECT_DOUBLE_EQ(EvaluatePolicy(cand, mix, bank, spec, 6, 5).score, (a + b) / 2);
}

TEST(EvaluatePolicyTest, BrokenCandidateIsRejected) {
  const PolicyHandle broken("broken", GameId::kRrps, PolicyKind::kNative,
                            [](uint64_t) -> std::unique_ptr<Agent> {
                              struct Banana : Agent {
                                std::string Act(const Observation&) override {
                                  return "BANANA";
                                }
                              };
                              return std::make_unique<Banana>();
                            });
  const auto ev = EvaluatePolicy(broken, Pure({"rockbot"}, 0), {Rrps("rockbot")},
                                 RepeatedGameSpec::Rrps(), 2, 1);
  EXPECT_TRUE(ev.rejected);
  EXPECT_EQ(ev.score, -std::numeric_limits<double>::infinity());
  EXPECT_FALSE(ev.rejection_reason.empty());
}

TEST(EvaluatePolicyTest, AlwaysCallAgainstAlwaysFoldIsShowdownLuck) {
  const auto call = FindBot(GameId::kRepeatedLeduc, "AlwaysCall")->factory();
  const auto fold = FindBot(GameId::kRepeatedLeduc, "AlwaysFold")->factory();
  const auto ev = EvaluatePolicy(call, Pure({"AlwaysFold"}, 0), {fold},
                                 RepeatedGameSpec::Leduc(), 50, 2);
  EXPECT_LE(std::abs(ev.score), 3 * ev.per_opponent[0].std_err);
}

}  // namespace
}  // namespace csro
