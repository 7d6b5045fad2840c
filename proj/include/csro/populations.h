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

#ifndef CSRO_POPULATIONS_H_
#define CSRO_POPULATIONS_H_

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "csro/policy.h"

// Native heuristic opponents used for evaluation.
//
// The RRPS bots reimplement twelve of the classic RoShamBo competition
// entrants from their one-line descriptions. Where a description leaves a
// rule open (first move, tie-breaking), the rule chosen here is stated in
// the bot's descriptor and frozen by golden tests:
//
//   randbot     uniform random every throw.
//   rockbot     always ROCK.
//   copybot     ROCK first; then plays the move that beats the opponent's
//               previous move.
//   rotatebot   ROCK, PAPER, SCISSORS, ROCK, ... by throw index.
//   pibot       throw t plays decimal digit t of pi (3, 1, 4, 1, 5, ...)
//               modulo 3 as ROCK/PAPER/SCISSORS.
//   freqbot2    beats the opponent's most frequent move so far (ties and the
//               empty history resolve to the lowest move, ROCK).
//   driftbot    random first move; then repeats its own previous move with
//               probability 1/2, otherwise shifts it by a drift of +1 that
//               flips to +2 (and back) every 100 throws.
//   antiflatbot expects the opponent to balance its counts, predicts the
//               opponent's least frequent move (random among ties) and
//               beats it.
//   switchbot   random first move; then uniformly one of the two moves that
//               differ from its own previous move.
//   flatbot3    with probability 0.8 plays its own least used move (random
//               among ties), otherwise uniform random.
//   multibot    three internal predictors (beat the opponent's most frequent
//               move, beat its last move, beat the beater of its last move);
//               each is credited with the payoff its suggestion would have
//               earned, and the most profitable one so far is followed (ties
//               by lowest index).
//   markov5     order-5 Markov model of the opponent: counts the move that
//               followed each 5-gram of opponent moves; after a 5-gram seen
//               at least once, predicts the most frequent successor (random
//               among ties) and beats it; otherwise plays uniform random.
namespace csro {

struct BotDescriptor {
  std::string name;
  GameId game;
  std::string description;
  std::function<PolicyHandle()> factory;
};

// The twelve-bot RRPS evaluation population, in the order listed above.
std::vector<BotDescriptor> RrpsPopulation();

// Constant bots other than rockbot: paperbot and scissorsbot.
std::vector<BotDescriptor> RrpsConstantBots();

// AlwaysCall and AlwaysFold (folds whenever FOLD is legal, else calls).
std::vector<BotDescriptor> LeducHeuristics();

// Native port of the shipped rule-based starting bot for repeated Leduc
// (policies/leduc_heuristic.py): raise with a king preflop, call otherwise;
// postflop raise with a pair or a private card above the board, else call.
PolicyHandle LeducHeuristicPolicy();

// Uniform random RRPS policy (same behavior as randbot).
PolicyHandle UniformRandomRrpsPolicy();

// Looks up any native bot by name across all of the above ("leduc_heuristic"
// for the port). Returns nullopt if unknown.
std::optional<BotDescriptor> FindBot(GameId game, std::string_view name);

// Digits of pi after (and including) the leading 3, computed once.
const std::string& PiDigits();

}  // namespace csro

#endif  // CSRO_POPULATIONS_H_
