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

#ifndef CSRO_RRPS_H_
#define CSRO_RRPS_H_

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "csro/util.h"

// Repeated Rock-Paper-Scissors stage game.
namespace csro::rrps {

enum class Move { kRock = 0, kPaper = 1, kScissors = 2 };

inline constexpr std::array<Move, 3> kAllMoves = {Move::kRock, Move::kPaper,
                                                  Move::kScissors};
inline constexpr int kDefaultRounds = 1000;

// "ROCK", "PAPER", "SCISSORS".
std::string_view MoveName(Move m);
std::optional<Move> ParseMove(std::string_view s);

// The move that beats m.
inline Move CounterMove(Move m) {
  return static_cast<Move>((static_cast<int>(m) + 1) % 3);
}

// +1 if a beats b, -1 if b beats a, 0 on a tie.
int StagePayoff(Move a, Move b);

// What a player sees before choosing its move: the previous round's moves.
// Both fields are empty in round 0 and both set afterwards.
struct Observation {
  std::optional<Move> my_action;
  std::optional<Move> opponent_action;

  bool operator==(const Observation&) const = default;
};

// {"my_action": "ROCK"|null, "opponent_action": "PAPER"|null}
OrderedJson ToJson(const Observation& obs);
Observation ObservationFromJson(const Json& j);

}  // namespace csro::rrps

#endif  // CSRO_RRPS_H_
