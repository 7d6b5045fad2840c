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

#ifndef CSRO_GAME_H_
#define CSRO_GAME_H_

#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "csro/leduc.h"
#include "csro/rrps.h"
#include "csro/util.h"

namespace csro {

enum class GameId { kRrps, kRepeatedLeduc };

// "rrps", "leduc".
std::string_view GameName(GameId id);
std::optional<GameId> ParseGameId(std::string_view s);

struct RepeatedGameSpec {
  GameId game_id = GameId::kRrps;
  // Stage games per match: throws for RRPS, hands for Leduc.
  int num_rounds = rrps::kDefaultRounds;
  leduc::StakeMode stake_mode = leduc::StakeMode::kAnte;

  static RepeatedGameSpec Rrps(int rounds = rrps::kDefaultRounds);
  static RepeatedGameSpec Leduc(
      int hands = leduc::kDefaultHands,
      leduc::StakeMode mode = leduc::StakeMode::kAnte);
  static RepeatedGameSpec Default(GameId id);

  // Throws std::invalid_argument if num_rounds <= 0.
  void Validate() const;
};

using Observation = std::variant<rrps::Observation, leduc::Observation>;

OrderedJson ObservationToJson(const Observation& obs);

}  // namespace csro

#endif  // CSRO_GAME_H_
