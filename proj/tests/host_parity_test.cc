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

// Runs the shipped Python policies through a real policy host. Skipped unless
// $CSRO_POLICY_HOST names one.

#include <string>

#include "csro/code_policy.h"
#include "csro/match.h"
#include "csro/populations.h"
#include "gtest/gtest.h"

namespace csro {
namespace {

std::string Policy(const std::string& name) {
  return ReadFile(std::string(CSRO_SOURCE_DIR) + "/policies/" + name);
}

HostConfig Host() {
  HostConfig host = HostConfig::FromEnvironment();
  host.prefer_host = true;
  host.move_timeout_ms = 5000;
  host.handshake_timeout_ms = 20000;
  return host;
}

#define REQUIRE_HOST()                                        \
  if (Host().command.empty()) {                               \
    GTEST_SKIP() << "CSRO_POLICY_HOST not set";               \
  }

TEST(HostParityTest, HeuristicListingMatchesNativePort) {
  REQUIRE_HOST();
  const auto hosted = SpawnCodePolicy("heuristic", Policy("leduc_heuristic.py"),
                                      GameId::kRepeatedLeduc, Host());
  auto host_agent = hosted.NewAgent(0);
  auto native_agent = LeducHeuristicPolicy().NewAgent(0);
  Rng rng(2024);
  int checked = 0, mismatches = 0;
  while (checked < 10000) {
    const auto mode = rng.Bernoulli(0.5) ? leduc::StakeMode::kAnte
                                         : leduc::StakeMode::kBlinds;
    leduc::HandState s = leduc::HandState::Deal(mode, leduc::StandardDeck(), rng);
    while (!s.IsTerminal() && checked < 10000) {
      const Observation obs = s.ObservationFor(s.CurrentPlayer());
      const std::string a = host_agent->Act(obs);
      const std::string b = native_agent->Act(obs);
      if (a != b) {
        ++mismatches;
        ADD_FAILURE() << ObservationToJson(obs).dump() << ": host " << a
                      << ", native " << b;
      }
      ++checked;
      const auto legal = s.LegalActions();
      s.Apply(legal[rng.UniformInt(static_cast<int>(legal.size()))]);
    }
  }
  EXPECT_EQ(mismatches, 0);
}

TEST(HostParityTest, RrpsListingPlaysFullMatch) {
  REQUIRE_HOST();
  const auto hosted = SpawnCodePolicy("ensemble", Policy("rrps_ensemble.py"),
                                      GameId::kRrps, Host());
  for (const char* opp : {"rockbot", "markov5"}) {
    const auto r = PlayMatch(RepeatedGameSpec::Rrps(), hosted,
                             FindBot(GameId::kRrps, opp)->factory(), 1);
    EXPECT_EQ(r.violations, (std::array<int, 2>{0, 0}));
    EXPECT_EQ(r.transcript["moves"].size(), 1000u);
  }
}

TEST(HostParityTest, AdaptiveLeducListingPlaysFullMatch) {
  REQUIRE_HOST();
  const auto hosted = SpawnCodePolicy("adaptive", Policy("leduc_adaptive.py"),
                                      GameId::kRepeatedLeduc, Host());
  for (const char* opp : {"AlwaysCall", "AlwaysFold"}) {
    const auto r = PlayMatch(RepeatedGameSpec::Leduc(), hosted,
                             FindBot(GameId::kRepeatedLeduc, opp)->factory(), 1);
    EXPECT_EQ(r.violations, (std::array<int, 2>{0, 0}));
    EXPECT_EQ(r.transcript["hands"].size(), 100u);
  }
}

TEST(HostParityTest, MissingAgentClassIsLoadError) {
  REQUIRE_HOST();
  try {
    SpawnCodePolicy("broken", "x = 1\n", GameId::kRrps, Host());
    FAIL();
  } catch (const PolicyError& e) {
    EXPECT_EQ(e.kind(), PolicyError::Kind::kLoad);
  }
  try {
    SpawnCodePolicy("syntax", "class Agent(:\n", GameId::kRrps, Host());
    FAIL();
  } catch (const PolicyError& e) {
    EXPECT_EQ(e.kind(), PolicyError::Kind::kLoad);
    EXPECT_NE(std::string(e.what()).find("SyntaxError"), std::string::npos);
  }
}

TEST(HostParityTest, AgentExceptionKeepsHostAlive) {
  REQUIRE_HOST();
  const std::string source =
      "class Agent:\n"
      "  def __init__(self):\n"
      "    self.n = 0\n"
      "  def act(self, obs):\n"
      "    self.n += 1\n"
      "    if self.n == 3:\n"
      "      raise ValueError('third call')\n"
      "    print('noise on stdout')\n"
      "    return 'PAPER'\n";
  const auto hosted = SpawnCodePolicy("flaky", source, GameId::kRrps, Host());
  const auto r = PlayMatch(RepeatedGameSpec::Rrps(10), hosted,
                           FindBot(GameId::kRrps, "rockbot")->factory(), 1,
                           {ViolationMode::kSubstitute, 3});
  EXPECT_EQ(r.violations, (std::array<int, 2>{1, 0}));
  EXPECT_EQ(r.returns[0], 9);
}

}  // namespace
}  // namespace csro
