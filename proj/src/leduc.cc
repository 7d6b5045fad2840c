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

#include "csro/leduc.h"

#include <algorithm>

namespace csro::leduc {
namespace {

int RaiseAmount(BettingRound r) { return r == BettingRound::kPreflop ? 2 : 4; }

char ActionLetter(Action a) {
  switch (a) {
    case Action::kFold:
      return 'f';
    case Action::kCall:
      return 'c';
    case Action::kRaise:
      return 'r';
  }
  return '?';
}

int RoundIndex(BettingRound r) { return static_cast<int>(r); }

}  // namespace

std::string_view RankName(Rank r) {
  switch (r) {
    case Rank::kJack:
      return "J";
    case Rank::kQueen:
      return "Q";
    case Rank::kKing:
      return "K";
  }
  return "?";
}

std::optional<Rank> ParseRank(std::string_view s) {
  if (s == "J") return Rank::kJack;
  if (s == "Q") return Rank::kQueen;
  if (s == "K") return Rank::kKing;
  return std::nullopt;
}

std::string_view ActionName(Action a) {
  switch (a) {
    case Action::kFold:
      return "FOLD";
    case Action::kCall:
      return "CALL";
    case Action::kRaise:
      return "RAISE";
  }
  return "?";
}

std::optional<Action> ParseAction(std::string_view s) {
  if (s == "FOLD") return Action::kFold;
  if (s == "CALL") return Action::kCall;
  if (s == "RAISE") return Action::kRaise;
  return std::nullopt;
}

std::string_view RoundName(BettingRound r) {
  return r == BettingRound::kPreflop ? "PREFLOP" : "POSTFLOP";
}

std::string_view StakeModeName(StakeMode m) {
  return m == StakeMode::kAnte ? "ante" : "blinds";
}

std::optional<StakeMode> ParseStakeMode(std::string_view s) {
  if (s == "ante" || s == "ANTE") return StakeMode::kAnte;
  if (s == "blinds" || s == "BLINDS") return StakeMode::kBlinds;
  return std::nullopt;
}

std::vector<Rank> StandardDeck() {
  return {Rank::kJack,  Rank::kJack, Rank::kQueen,
          Rank::kQueen, Rank::kKing, Rank::kKing};
}

HandStrength HandRank(Rank private_card, Rank public_card) {
  const int p = static_cast<int>(private_card) + 1;
  const int b = static_cast<int>(public_card) + 1;
  if (p == b) return {3 + p, 0};
  return {std::max(p, b), std::min(p, b)};
}

HandState::HandState(StakeMode mode, std::array<Rank, 2> private_cards,
                     Rank public_card)
    : mode_(mode), private_cards_(private_cards), public_card_(public_card) {
  if (mode_ == StakeMode::kAnte) {
    contributions_ = {1, 1};
  } else {
    contributions_ = {1, 2};
    raises_this_round_ = 1;
  }
}

HandState HandState::Deal(StakeMode mode, const std::vector<Rank>& deck,
                          Rng& rng) {
  if (deck.size() < 3) throw std::invalid_argument("deck needs >= 3 cards");
  std::vector<Rank> cards = deck;
  // Partial Fisher-Yates for the three cards actually used.
  for (int i = 0; i < 3; ++i) {
    const int j = i + rng.UniformInt(static_cast<int>(cards.size()) - i);
    std::swap(cards[i], cards[j]);
  }
  return HandState(mode, {cards[0], cards[1]}, cards[2]);
}

int HandState::AmountToCall() const {
  const int top = std::max(contributions_[0], contributions_[1]);
  return top - contributions_[current_player_];
}

std::vector<Action> HandState::LegalActions() const {
  if (terminal_) throw InvalidStateError("legal actions of a terminal hand");
  std::vector<Action> actions;
  if (AmountToCall() > 0) actions.push_back(Action::kFold);
  actions.push_back(Action::kCall);
  if (raises_this_round_ < kMaxRaisesPerRound) actions.push_back(Action::kRaise);
  return actions;
}

bool HandState::IsLegal(Action a) const {
  if (terminal_) return false;
  switch (a) {
    case Action::kFold:
      return AmountToCall() > 0;
    case Action::kCall:
      return true;
    case Action::kRaise:
      return raises_this_round_ < kMaxRaisesPerRound;
  }
  return false;
}

void HandState::Apply(Action a) {
  if (terminal_) throw InvalidStateError("action applied to a terminal hand");
  if (!IsLegal(a)) {
    throw IllegalActionError("illegal action " + std::string(ActionName(a)) +
                             " at history '" + BettingString() + "'");
  }
  const int me = current_player_;
  const int top = std::max(contributions_[0], contributions_[1]);
  auto& round_history = history_[RoundIndex(round_)];
  const bool first_action_of_round = round_history.empty();
  round_history.push_back({me, a});
  switch (a) {
    case Action::kFold:
      folded_player_ = me;
      terminal_ = true;
      return;
    case Action::kRaise:
      contributions_[me] = top + RaiseAmount(round_);
      ++raises_this_round_;
      current_player_ = 1 - me;
      return;
    case Action::kCall:
      contributions_[me] = top;
      if (first_action_of_round) {
        current_player_ = 1 - me;
        return;
      }
      // A call after the opening action closes the round.
      if (round_ == BettingRound::kPreflop) {
        round_ = BettingRound::kPostflop;
        raises_this_round_ = 0;
        current_player_ = 0;
      } else {
        terminal_ = true;
      }
      return;
  }
}

HandState HandState::Child(Action a) const {
  HandState next = *this;
  next.Apply(a);
  return next;
}

std::optional<Rank> HandState::public_card() const {
  if (round_ == BettingRound::kPostflop) return public_card_;
  return std::nullopt;
}

std::array<int, 2> HandState::Stacks() const {
  if (terminal_) {
    const auto r = Result().returns;
    return {kStartingStack + r[0], kStartingStack + r[1]};
  }
  return {kStartingStack - contributions_[0],
          kStartingStack - contributions_[1]};
}

GameResult HandState::Result() const {
  if (!terminal_) throw InvalidStateError("result of a running hand");
  GameResult result;
  if (folded_player_) {
    const int loser = *folded_player_;
    const int winner = 1 - loser;
    result.outcome = Outcome::kFold;
    result.returns[winner] = contributions_[loser];
    result.returns[loser] = -contributions_[loser];
    return result;
  }
  result.outcome = Outcome::kShowdown;
  result.showdown_hands = std::array<ShowdownHand, 2>{
      ShowdownHand{0, private_cards_[0]}, ShowdownHand{1, private_cards_[1]}};
  const HandStrength s0 = HandRank(private_cards_[0], public_card_);
  const HandStrength s1 = HandRank(private_cards_[1], public_card_);
  if (s0 > s1) {
    result.returns = {contributions_[1], -contributions_[1]};
  } else if (s1 > s0) {
    result.returns = {-contributions_[0], contributions_[0]};
  }
  return result;
}

std::string HandState::BettingString() const {
  std::string s;
  for (const auto& e : history_[0]) s += ActionLetter(e.action);
  if (round_ == BettingRound::kPostflop) {
    s += '/';
    for (const auto& e : history_[1]) s += ActionLetter(e.action);
  }
  return s;
}

Observation HandState::ObservationFor(int player) const {
  Observation obs;
  obs.player_id = player;
  obs.current_player = !terminal_ && current_player_ == player;
  obs.hand = private_cards_[player];
  if (obs.current_player) obs.legal_actions = LegalActions();
  obs.round = round_;
  obs.chips = Stacks();
  obs.pot_size = terminal_ ? 0 : pot();
  obs.public_card = public_card();
  obs.action_history = history_;
  if (terminal_) obs.game_result = Result();
  return obs;
}

OrderedJson ToJson(const Observation& obs) {
  auto history_json = [](const std::vector<HistoryEntry>& entries) {
    OrderedJson arr = OrderedJson::array();
    for (const auto& e : entries) {
      OrderedJson item = OrderedJson::object();
      item["player_id"] = e.player_id;
      item["action"] = ActionName(e.action);
      arr.push_back(std::move(item));
    }
    return arr;
  };

  OrderedJson player_view = OrderedJson::object();
  player_view["player_id"] = obs.player_id;
  player_view["current_player"] = obs.current_player;
  player_view["hand"] = RankName(obs.hand);
  OrderedJson legal = OrderedJson::array();
  for (Action a : obs.legal_actions) legal.push_back(ActionName(a));
  player_view["legal_actions"] = std::move(legal);

  OrderedJson public_state = OrderedJson::object();
  public_state["round"] = RoundName(obs.round);
  public_state["chips"] = obs.chips;
  public_state["pot_size"] = obs.pot_size;
  public_state["public_card"] = obs.public_card
                                    ? OrderedJson(RankName(*obs.public_card))
                                    : OrderedJson(nullptr);

  OrderedJson action_history = OrderedJson::object();
  action_history["PREFLOP"] = history_json(obs.action_history[0]);
  action_history["POSTFLOP"] = history_json(obs.action_history[1]);

  OrderedJson j = OrderedJson::object();
  j["player_view"] = std::move(player_view);
  j["public_state"] = std::move(public_state);
  j["action_history"] = std::move(action_history);
  if (obs.game_result) {
    const GameResult& r = *obs.game_result;
    OrderedJson result = OrderedJson::object();
    result["outcome"] = r.outcome == Outcome::kFold ? "FOLD" : "SHOWDOWN";
    result["returns"] = r.returns;
    if (r.showdown_hands) {
      OrderedJson hands = OrderedJson::array();
      for (const auto& h : *r.showdown_hands) {
        OrderedJson item = OrderedJson::object();
        item["player_id"] = h.player_id;
        item["hand"] = RankName(h.hand);
        hands.push_back(std::move(item));
      }
      result["showdown_hands"] = std::move(hands);
    } else {
      result["showdown_hands"] = nullptr;
    }
    j["game_result"] = std::move(result);
  } else {
    j["game_result"] = nullptr;
  }
  return j;
}

Observation ObservationFromJson(const Json& j) {
  auto rank = [](const Json& v) {
    auto r = ParseRank(v.get<std::string>());
    if (!r) throw std::invalid_argument("bad card " + v.dump());
    return *r;
  };
  auto action = [](const Json& v) {
    auto a = ParseAction(v.get<std::string>());
    if (!a) throw std::invalid_argument("bad action " + v.dump());
    return *a;
  };
  Observation obs;
  const Json& pv = j.at("player_view");
  obs.player_id = pv.at("player_id").get<int>();
  obs.current_player = pv.at("current_player").get<bool>();
  obs.hand = rank(pv.at("hand"));
  for (const auto& a : pv.at("legal_actions")) {
    obs.legal_actions.push_back(action(a));
  }
  const Json& ps = j.at("public_state");
  const std::string round = ps.at("round").get<std::string>();
  if (round == "PREFLOP") {
    obs.round = BettingRound::kPreflop;
  } else if (round == "POSTFLOP") {
    obs.round = BettingRound::kPostflop;
  } else {
    throw std::invalid_argument("bad round " + round);
  }
  obs.chips = ps.at("chips").get<std::array<int, 2>>();
  obs.pot_size = ps.at("pot_size").get<int>();
  if (!ps.at("public_card").is_null()) obs.public_card = rank(ps.at("public_card"));
  const Json& ah = j.at("action_history");
  int index = 0;
  for (const char* name : {"PREFLOP", "POSTFLOP"}) {
    for (const auto& e : ah.at(name)) {
      obs.action_history[index].push_back(
          {e.at("player_id").get<int>(), action(e.at("action"))});
    }
    ++index;
  }
  if (j.contains("game_result") && !j.at("game_result").is_null()) {
    const Json& gr = j.at("game_result");
    GameResult r;
    const std::string outcome = gr.at("outcome").get<std::string>();
    r.outcome = outcome == "FOLD" ? Outcome::kFold : Outcome::kShowdown;
    r.returns = gr.at("returns").get<std::array<int, 2>>();
    if (!gr.at("showdown_hands").is_null()) {
      std::array<ShowdownHand, 2> hands;
      for (int i = 0; i < 2; ++i) {
        const Json& h = gr.at("showdown_hands").at(i);
        hands[i] = {h.at("player_id").get<int>(), rank(h.at("hand"))};
      }
      r.showdown_hands = hands;
    }
    obs.game_result = r;
  }
  return obs;
}

}  // namespace csro::leduc
