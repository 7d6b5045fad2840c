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

#include "csro/game.h"

#include <stdexcept>

namespace csro {

std::string_view GameName(GameId id) {
  return id == GameId::kRrps ? "rrps" : "leduc";
}

std::optional<GameId> ParseGameId(std::string_view s) {
  if (s == "rrps" || s == "RRPS") return GameId::kRrps;
  if (s == "leduc" || s == "repeated_leduc" || s == "REPEATED_LEDUC") {
    return GameId::kRepeatedLeduc;
  }
  return std::nullopt;
}

RepeatedGameSpec RepeatedGameSpec::Rrps(int rounds) {
  return {GameId::kRrps, rounds, leduc::StakeMode::kAnte};
}

RepeatedGameSpec RepeatedGameSpec::Leduc(int hands, leduc::StakeMode mode) {
  return {GameId::kRepeatedLeduc, hands, mode};
}

RepeatedGameSpec RepeatedGameSpec::Default(GameId id) {
  return id == GameId::kRrps ? Rrps() : Leduc();
}

void RepeatedGameSpec::Validate() const {
  if (num_rounds <= 0) {
    throw std::invalid_argument("num_rounds must be positive");
  }
}

OrderedJson ObservationToJson(const Observation& obs) {
  return std::visit([](const auto& o) { return ToJson(o); }, obs);
}

}  // namespace csro
