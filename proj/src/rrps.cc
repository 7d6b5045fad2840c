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

#include "csro/rrps.h"

#include <stdexcept>

namespace csro::rrps {

std::string_view MoveName(Move m) {
  switch (m) {
    case Move::kRock:
      return "ROCK";
    case Move::kPaper:
      return "PAPER";
    case Move::kScissors:
      return "SCISSORS";
  }
  return "?";
}

std::optional<Move> ParseMove(std::string_view s) {
  if (s == "ROCK") return Move::kRock;
  if (s == "PAPER") return Move::kPaper;
  if (s == "SCISSORS") return Move::kScissors;
  return std::nullopt;
}

int StagePayoff(Move a, Move b) {
  const int d = (static_cast<int>(a) - static_cast<int>(b) + 3) % 3;
  if (d == 0) return 0;
  return d == 1 ? 1 : -1;
}

OrderedJson ToJson(const Observation& obs) {
  OrderedJson j = OrderedJson::object();
  j["my_action"] = obs.my_action ? OrderedJson(MoveName(*obs.my_action))
                                 : OrderedJson(nullptr);
  j["opponent_action"] = obs.opponent_action
                             ? OrderedJson(MoveName(*obs.opponent_action))
                             : OrderedJson(nullptr);
  return j;
}

Observation ObservationFromJson(const Json& j) {
  auto field = [&](const char* key) -> std::optional<Move> {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    auto m = ParseMove(j.at(key).get<std::string>());
    if (!m) throw std::invalid_argument(std::string("bad move in ") + key);
    return m;
  };
  return Observation{field("my_action"), field("opponent_action")};
}

}  // namespace csro::rrps
