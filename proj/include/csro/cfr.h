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

#ifndef CSRO_CFR_H_
#define CSRO_CFR_H_

#include <array>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "csro/leduc.h"
#include "csro/policy.h"

// CFR+ for a single hand of Leduc, exact best responses, and the solved
// strategy as a playable policy.
namespace csro::cfr {

// Action probabilities indexed by leduc::Action (FOLD, CALL, RAISE). Illegal
// actions hold 0.
using ActionProbs = std::array<double, 3>;

// "<player>:<private card>:<public card or ->:<betting>", e.g. "1:K:-:r" or
// "0:J:Q:rc/r". The betting string is HandState::BettingString().
std::string InfoSetKey(int player, leduc::Rank card,
                       std::optional<leduc::Rank> public_card,
                       const std::string& betting);
// Same key from a player's observation.
std::string InfoSetKey(const leduc::Observation& obs);

// Proportional to `regret` when its sum is positive, else uniform.
std::vector<double> RegretMatchingPlus(const std::vector<double>& regret);

class MissingInfoSetError : public std::out_of_range {
 public:
  explicit MissingInfoSetError(const std::string& key)
      : std::out_of_range("no strategy for infoset " + key), key_(key) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct StrategyProfile {
  leduc::StakeMode stake_mode = leduc::StakeMode::kAnte;
  std::map<std::string, ActionProbs> table;

  // Throws MissingInfoSetError.
  const ActionProbs& At(const std::string& key) const;

  // {"<key>": {"CALL": p, "RAISE": q, ...}}; only legal actions appear.
  OrderedJson ToJson() const;
  static StrategyProfile FromJson(const Json& j, leduc::StakeMode mode);
};

struct SolveOptions;
StrategyProfile CfrPlusSolve(const SolveOptions& options);

// The single-hand game tree with a fixed deck. Cards are dealt without
// replacement: player 0, player 1, then the public card.
class LeducTree {
 public:
  explicit LeducTree(leduc::StakeMode mode,
                     std::vector<leduc::Rank> deck = leduc::StandardDeck());
  ~LeducTree();
  LeducTree(const LeducTree&) = delete;
  LeducTree& operator=(const LeducTree&) = delete;

  leduc::StakeMode stake_mode() const;
  const std::vector<leduc::Rank>& deck() const;
  // Every information set reachable under some deal, sorted.
  std::vector<std::string> InfoSetKeys() const;
  // Legal actions at an information set.
  std::vector<leduc::Action> Legal(const std::string& key) const;

  // Profile where every infoset plays f(key, legal actions). f must return a
  // distribution over the legal actions.
  StrategyProfile Tabulate(
      const std::function<ActionProbs(const std::string&,
                                      const std::vector<leduc::Action>&)>& f)
      const;
  StrategyProfile Uniform() const;
  // Queries a stateless policy at one representative state per infoset and
  // plays its answer deterministically.
  StrategyProfile FromPolicy(const PolicyHandle& policy) const;

  // Expected return of the first profile in seat 0 against the second in
  // seat 1, in chips per hand.
  double ExpectedValue(const StrategyProfile& seat0,
                       const StrategyProfile& seat1) const;

  // Value a best responder in `seat` achieves against `profile` (which is
  // used for the other seat). Exact expectimax over the information sets.
  double BestResponseValue(const StrategyProfile& profile, int seat) const;

  // (BR_0 + BR_1) / 2, which is half the NashConv since the game is zero-sum.
  double Exploitability(const StrategyProfile& profile) const;

  struct Impl;

 private:
  friend StrategyProfile CfrPlusSolve(const SolveOptions& options);
  std::unique_ptr<Impl> impl_;
};

struct SolveOptions {
  int iterations = 10000;
  leduc::StakeMode stake_mode = leduc::StakeMode::kAnte;
  std::vector<leduc::Rank> deck = leduc::StandardDeck();
  // Called after each listed iteration count with the average profile.
  std::vector<int> checkpoints;
  std::function<void(int, const StrategyProfile&)> on_checkpoint;
};

// CFR+ with alternating updates, regrets clamped at zero after every update
// and the average strategy weighted by iteration number t. Zero iterations
// gives the uniform profile.
StrategyProfile CfrPlusSolve(const SolveOptions& options);
StrategyProfile CfrPlusSolve(int iterations, leduc::StakeMode mode);

// A CFR_TABLE policy that samples from the profile with the match seed. It
// throws MissingInfoSetError on an observation the profile does not cover.
PolicyHandle AsPolicy(const StrategyProfile& profile,
                      const std::string& id = "cfr_plus");

}  // namespace csro::cfr

#endif  // CSRO_CFR_H_
