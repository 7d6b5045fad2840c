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

#ifndef CSRO_LEDUC_H_
#define CSRO_LEDUC_H_

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "csro/util.h"

// Single hand of Leduc hold'em as a pure state machine.
//
// Seats: player 0 acts first in both betting rounds; player 1 is the dealer.
// Two stake structures are supported:
//   kAnte   - both players ante 1; raises of 2 (preflop) and 4 (postflop);
//             at most two raises per round.
//   kBlinds - player 0 posts 1, player 1 posts 2; same raise sizes; the big
//             blind counts as the first preflop raise, so a single voluntary
//             raise reaches the preflop cap.
namespace csro::leduc {

enum class Rank { kJack = 0, kQueen = 1, kKing = 2 };
enum class Action { kFold = 0, kCall = 1, kRaise = 2 };
enum class BettingRound { kPreflop = 0, kPostflop = 1 };
enum class StakeMode { kAnte, kBlinds };
enum class Outcome { kFold, kShowdown };

inline constexpr int kStartingStack = 100;
inline constexpr int kMaxRaisesPerRound = 2;
inline constexpr int kDefaultHands = 100;

class InvalidStateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class IllegalActionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::string_view RankName(Rank r);  // "J", "Q", "K"
std::optional<Rank> ParseRank(std::string_view s);
std::string_view ActionName(Action a);  // "FOLD", "CALL", "RAISE"
std::optional<Action> ParseAction(std::string_view s);
std::string_view RoundName(BettingRound r);  // "PREFLOP", "POSTFLOP"
std::string_view StakeModeName(StakeMode m);  // "ante", "blinds"
std::optional<StakeMode> ParseStakeMode(std::string_view s);

// The standard six-card deck {J,J,Q,Q,K,K}.
std::vector<Rank> StandardDeck();

// Showdown strength as the (major, minor) tuple: a pair scores (3 + rank, 0)
// with ranks J=1, Q=2, K=3; otherwise (higher card, lower card). Because the
// public card is shared, comparing two non-paired tuples reduces to comparing
// the private cards.
struct HandStrength {
  int major = 0;
  int minor = 0;
  auto operator<=>(const HandStrength&) const = default;
};
HandStrength HandRank(Rank private_card, Rank public_card);

struct HistoryEntry {
  int player_id = 0;
  Action action = Action::kCall;
  bool operator==(const HistoryEntry&) const = default;
};

struct ShowdownHand {
  int player_id = 0;
  Rank hand = Rank::kJack;
};

struct GameResult {
  Outcome outcome = Outcome::kFold;
  std::array<int, 2> returns = {0, 0};
  std::optional<std::array<ShowdownHand, 2>> showdown_hands;
};

// The JSON observation shown to one player (see ToJson for the schema).
struct Observation {
  int player_id = 0;
  bool current_player = false;
  Rank hand = Rank::kJack;
  std::vector<Action> legal_actions;
  BettingRound round = BettingRound::kPreflop;
  std::array<int, 2> chips = {kStartingStack, kStartingStack};
  int pot_size = 0;
  std::optional<Rank> public_card;
  std::array<std::vector<HistoryEntry>, 2> action_history;
  std::optional<GameResult> game_result;
};

// {"player_view": {"player_id", "current_player", "hand", "legal_actions"},
//  "public_state": {"round", "chips", "pot_size", "public_card"},
//  "action_history": {"PREFLOP": [...], "POSTFLOP": [...]},
//  "game_result": null | {"outcome", "returns", "showdown_hands"}}
OrderedJson ToJson(const Observation& obs);
Observation ObservationFromJson(const Json& j);

class HandState {
 public:
  // The public card is fixed at construction but hidden until the preflop
  // betting closes.
  HandState(StakeMode mode, std::array<Rank, 2> private_cards,
            Rank public_card);

  // Deals from a shuffled copy of `deck` (at least three cards).
  static HandState Deal(StakeMode mode, const std::vector<Rank>& deck,
                        Rng& rng);

  // Throws InvalidStateError on a terminal state. Ordered FOLD, CALL, RAISE.
  std::vector<Action> LegalActions() const;
  bool IsLegal(Action a) const;

  // Throws IllegalActionError (state unchanged) if `a` is not legal.
  void Apply(Action a);
  HandState Child(Action a) const;

  bool IsTerminal() const { return terminal_; }
  int CurrentPlayer() const { return current_player_; }
  BettingRound round() const { return round_; }
  StakeMode stake_mode() const { return mode_; }
  Rank private_card(int player) const { return private_cards_[player]; }
  Rank hidden_public_card() const { return public_card_; }
  std::optional<Rank> public_card() const;
  const std::array<int, 2>& contributions() const { return contributions_; }
  int pot() const { return contributions_[0] + contributions_[1]; }
  int AmountToCall() const;
  int raises_this_round() const { return raises_this_round_; }
  const std::array<std::vector<HistoryEntry>, 2>& action_history() const {
    return history_;
  }

  // Chips behind for each player. While the hand is running this is the
  // starting stack minus the contribution; once terminal it is the starting
  // stack plus the hand's return (the pot has been paid out).
  std::array<int, 2> Stacks() const;

  // Terminal only.
  GameResult Result() const;
  std::array<int, 2> Returns() const { return Result().returns; }

  // Betting history as "rrc/cc": one letter per action, rounds separated by
  // '/' once the postflop round has started.
  std::string BettingString() const;

  Observation ObservationFor(int player) const;

 private:
  StakeMode mode_;
  std::array<Rank, 2> private_cards_;
  Rank public_card_;
  BettingRound round_ = BettingRound::kPreflop;
  std::array<int, 2> contributions_ = {0, 0};
  std::array<std::vector<HistoryEntry>, 2> history_;
  int current_player_ = 0;
  int raises_this_round_ = 0;
  bool terminal_ = false;
  std::optional<int> folded_player_;
};

}  // namespace csro::leduc

#endif  // CSRO_LEDUC_H_
