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

#include "csro/populations.h"

#include <algorithm>
#include <array>
#include <map>
#include <memory>
#include <utility>

namespace csro {
namespace {

using rrps::CounterMove;
using rrps::Move;

class RrpsBot : public Agent {
 public:
  explicit RrpsBot(uint64_t seed) : rng_(seed) {}

  std::string Act(const Observation& obs) final {
    const auto& o = std::get<rrps::Observation>(obs);
    if (o.my_action && o.opponent_action) {
      my_.push_back(*o.my_action);
      opp_.push_back(*o.opponent_action);
      Observe(*o.my_action, *o.opponent_action);
    }
    return std::string(rrps::MoveName(Choose()));
  }

 protected:
  virtual void Observe(Move /*mine*/, Move /*theirs*/) {}
  virtual Move Choose() = 0;

  Move RandomMove() { return static_cast<Move>(rng_.UniformInt(3)); }

  // Uniform choice among indices whose value equals the extreme one.
  template <typename Cmp>
  Move RandomExtreme(const std::array<int, 3>& counts, Cmp better) {
    int best = counts[0];
    for (int c : counts) {
      if (better(c, best)) best = c;
    }
    std::array<Move, 3> ties;
    int n = 0;
    for (int i = 0; i < 3; ++i) {
      if (counts[i] == best) ties[n++] = static_cast<Move>(i);
    }
    return ties[rng_.UniformInt(n)];
  }

  int round() const { return static_cast<int>(my_.size()); }

  Rng rng_;
  std::vector<Move> my_;
  std::vector<Move> opp_;
};

class RandBot final : public RrpsBot {
 public:
  using RrpsBot::RrpsBot;
  Move Choose() override { return RandomMove(); }
};

class ConstantBot final : public RrpsBot {
 public:
  ConstantBot(uint64_t seed, Move move) : RrpsBot(seed), move_(move) {}
  Move Choose() override { return move_; }

 private:
  Move move_;
};

class CopyBot final : public RrpsBot {
 public:
  using RrpsBot::RrpsBot;
  Move Choose() override {
    return opp_.empty() ? Move::kRock : CounterMove(opp_.back());
  }
};

class RotateBot final : public RrpsBot {
 public:
  using RrpsBot::RrpsBot;
  Move Choose() override { return static_cast<Move>(round() % 3); }
};

class PiBot final : public RrpsBot {
 public:
  using RrpsBot::RrpsBot;
  Move Choose() override {
    const std::string& digits = PiDigits();
    const int d = digits[round() % digits.size()] - '0';
    return static_cast<Move>(d % 3);
  }
};

class FreqBot2 final : public RrpsBot {
 public:
  using RrpsBot::RrpsBot;
  void Observe(Move, Move theirs) override {
    ++counts_[static_cast<int>(theirs)];
  }
  Move Choose() override {
    int best = 0;
    for (int i = 1; i < 3; ++i) {
      if (counts_[i] > counts_[best]) best = i;
    }
    return CounterMove(static_cast<Move>(best));
  }

 private:
  std::array<int, 3> counts_ = {0, 0, 0};
};

class DriftBot final : public RrpsBot {
 public:
  using RrpsBot::RrpsBot;
  Move Choose() override {
    if (my_.empty()) return RandomMove();
    if (rng_.Bernoulli(0.5)) return my_.back();
    const int drift = (round() / 100) % 2 == 0 ? 1 : 2;
    return static_cast<Move>((static_cast<int>(my_.back()) + drift) % 3);
  }
};

class AntiFlatBot final : public RrpsBot {
 public:
  using RrpsBot::RrpsBot;
  void Observe(Move, Move theirs) override {
    ++counts_[static_cast<int>(theirs)];
  }
  Move Choose() override {
    return CounterMove(RandomExtreme(counts_, std::less<int>()));
  }

 private:
  std::array<int, 3> counts_ = {0, 0, 0};
};

class SwitchBot final : public RrpsBot {
 public:
  using RrpsBot::RrpsBot;
  Move Choose() override {
    if (my_.empty()) return RandomMove();
    const int shift = 1 + rng_.UniformInt(2);
    return static_cast<Move>((static_cast<int>(my_.back()) + shift) % 3);
  }
};

class FlatBot3 final : public RrpsBot {
 public:
  using RrpsBot::RrpsBot;
  void Observe(Move mine, Move) override { ++mine_[static_cast<int>(mine)]; }
  Move Choose() override {
    if (rng_.Bernoulli(0.8)) return RandomExtreme(mine_, std::less<int>());
    return RandomMove();
  }

 private:
  std::array<int, 3> mine_ = {0, 0, 0};
};

class MultiBot final : public RrpsBot {
 public:
  using RrpsBot::RrpsBot;
  void Observe(Move, Move theirs) override {
    for (int i = 0; i < 3; ++i) {
      score_[i] += rrps::StagePayoff(suggestion_[i], theirs);
    }
    ++counts_[static_cast<int>(theirs)];
  }
  Move Choose() override {
    int most = 0;
    for (int i = 1; i < 3; ++i) {
      if (counts_[i] > counts_[most]) most = i;
    }
    const Move last = opp_.empty() ? Move::kRock : opp_.back();
    suggestion_[0] = CounterMove(static_cast<Move>(most));
    suggestion_[1] = CounterMove(last);
    suggestion_[2] = CounterMove(CounterMove(last));
    int best = 0;
    for (int i = 1; i < 3; ++i) {
      if (score_[i] > score_[best]) best = i;
    }
    return suggestion_[best];
  }

 private:
  std::array<int, 3> counts_ = {0, 0, 0};
  std::array<long long, 3> score_ = {0, 0, 0};
  std::array<Move, 3> suggestion_ = {Move::kRock, Move::kRock, Move::kRock};
};

class Markov5Bot final : public RrpsBot {
 public:
  static constexpr int kOrder = 5;
  using RrpsBot::RrpsBot;

  void Observe(Move, Move theirs) override {
    // opp_ already holds `theirs` as its last element.
    if (static_cast<int>(opp_.size()) > kOrder) {
      const int key = Key(opp_.size() - 1 - kOrder);
      ++table_[key][static_cast<int>(theirs)];
    }
  }

  Move Choose() override {
    if (static_cast<int>(opp_.size()) >= kOrder) {
      auto it = table_.find(Key(opp_.size() - kOrder));
      if (it != table_.end()) {
        return CounterMove(RandomExtreme(it->second, std::greater<int>()));
      }
    }
    return RandomMove();
  }

 private:
  // Base-3 encoding of opp_[start, start + kOrder).
  int Key(size_t start) const {
    int key = 0;
    for (int i = 0; i < kOrder; ++i) {
      key = key * 3 + static_cast<int>(opp_[start + i]);
    }
    return key;
  }

  std::map<int, std::array<int, 3>> table_;
};

class AlwaysCallBot final : public Agent {
 public:
  std::string Act(const Observation&) override { return "CALL"; }
};

class AlwaysFoldBot final : public Agent {
 public:
  std::string Act(const Observation& obs) override {
    const auto& o = std::get<leduc::Observation>(obs);
    for (leduc::Action a : o.legal_actions) {
      if (a == leduc::Action::kFold) return "FOLD";
    }
    return "CALL";
  }
};

class LeducHeuristicBot final : public Agent {
 public:
  std::string Act(const Observation& obs) override {
    const auto& o = std::get<leduc::Observation>(obs);
    auto legal = [&](leduc::Action a) {
      return std::find(o.legal_actions.begin(), o.legal_actions.end(), a) !=
             o.legal_actions.end();
    };
    auto raise_or_call = [&] { return legal(leduc::Action::kRaise) ? "RAISE" : "CALL"; };
    auto call_or_fold = [&] { return legal(leduc::Action::kCall) ? "CALL" : "FOLD"; };
    if (o.legal_actions.empty()) return "CALL";
    if (o.round == leduc::BettingRound::kPreflop) {
      if (o.hand == leduc::Rank::kKing) return raise_or_call();
      return call_or_fold();
    }
    // A missing board card scores 0, as in the Python original.
    const int board = o.public_card ? static_cast<int>(*o.public_card) + 1 : 0;
    if (o.public_card && o.hand == *o.public_card) return raise_or_call();
    if (static_cast<int>(o.hand) + 1 > board) return raise_or_call();
    return call_or_fold();
  }
};

template <typename Bot, typename... Args>
BotDescriptor RrpsDescriptor(std::string name, std::string description,
                             Args... args) {
  BotDescriptor d;
  d.name = name;
  d.game = GameId::kRrps;
  d.description = description;
  d.factory = [name, description, args...] {
    return PolicyHandle(
        name, GameId::kRrps, PolicyKind::kNative,
        [args...](uint64_t seed) { return std::make_unique<Bot>(seed, args...); },
        description);
  };
  return d;
}

template <typename Bot>
BotDescriptor LeducDescriptor(std::string name, std::string description) {
  BotDescriptor d;
  d.name = name;
  d.game = GameId::kRepeatedLeduc;
  d.description = description;
  d.factory = [name, description] {
    return PolicyHandle(
        name, GameId::kRepeatedLeduc, PolicyKind::kNative,
        [](uint64_t) { return std::make_unique<Bot>(); }, description);
  };
  return d;
}

// Rabinowitz-Wagon spigot.
std::string ComputePiDigits(int n) {
  const int len = n * 10 / 3 + 1;
  std::vector<int> a(len, 2);
  std::string digits;
  int nines = 0;
  int predigit = 0;
  for (int j = 0; j < n; ++j) {
    int q = 0;
    for (int i = len; i > 0; --i) {
      const int x = 10 * a[i - 1] + q * i;
      a[i - 1] = x % (2 * i - 1);
      q = x / (2 * i - 1);
    }
    a[0] = q % 10;
    q /= 10;
    if (q == 9) {
      ++nines;
    } else if (q == 10) {
      digits += static_cast<char>('0' + predigit + 1);
      digits.append(nines, '0');
      predigit = 0;
      nines = 0;
    } else {
      if (j > 0) digits += static_cast<char>('0' + predigit);
      predigit = q;
      if (nines != 0) {
        digits.append(nines, '9');
        nines = 0;
      }
    }
  }
  digits += static_cast<char>('0' + predigit);
  return digits;
}

}  // namespace

const std::string& PiDigits() {
  static const std::string* digits = new std::string(ComputePiDigits(1200));
  return *digits;
}

std::vector<BotDescriptor> RrpsPopulation() {
  return {
      RrpsDescriptor<RandBot>("randbot", "uniform random every throw"),
      RrpsDescriptor<ConstantBot>("rockbot", "always ROCK", Move::kRock),
      RrpsDescriptor<CopyBot>(
          "copybot", "ROCK first, then beats the opponent's previous move"),
      RrpsDescriptor<RotateBot>("rotatebot",
                                "cycles ROCK, PAPER, SCISSORS by throw index"),
      RrpsDescriptor<PiBot>("pibot",
                            "throw t plays digit t of pi modulo 3"),
      RrpsDescriptor<FreqBot2>(
          "freqbot2",
          "beats the opponent's most frequent move (ties to ROCK)"),
      RrpsDescriptor<DriftBot>(
          "driftbot",
          "repeats its last move w.p. 1/2, else shifts it by a drift that "
          "alternates +1/+2 every 100 throws"),
      RrpsDescriptor<AntiFlatBot>(
          "antiflatbot",
          "beats the opponent's least frequent move (random among ties)"),
      RrpsDescriptor<SwitchBot>(
          "switchbot", "uniform over the two moves unlike its previous move"),
      RrpsDescriptor<FlatBot3>(
          "flatbot3",
          "plays its own least used move w.p. 0.8, else uniform random"),
      RrpsDescriptor<MultiBot>(
          "multibot",
          "follows the most profitable of three internal predictors"),
      RrpsDescriptor<Markov5Bot>(
          "markov5",
          "order-5 Markov prediction of the opponent, beats the predicted "
          "move; uniform random on unseen contexts"),
  };
}

std::vector<BotDescriptor> RrpsConstantBots() {
  return {
      RrpsDescriptor<ConstantBot>("paperbot", "always PAPER", Move::kPaper),
      RrpsDescriptor<ConstantBot>("scissorsbot", "always SCISSORS",
                                  Move::kScissors),
  };
}

std::vector<BotDescriptor> LeducHeuristics() {
  return {
      LeducDescriptor<AlwaysCallBot>("AlwaysCall", "always CALL"),
      LeducDescriptor<AlwaysFoldBot>(
          "AlwaysFold", "FOLD whenever FOLD is legal, otherwise CALL"),
  };
}

PolicyHandle LeducHeuristicPolicy() {
  return LeducDescriptor<LeducHeuristicBot>(
             "leduc_heuristic",
             "rule-based: raise strong hands, call otherwise")
      .factory();
}

PolicyHandle UniformRandomRrpsPolicy() {
  return RrpsDescriptor<RandBot>("uniform_random", "uniform random every throw")
      .factory();
}

std::optional<BotDescriptor> FindBot(GameId game, std::string_view name) {
  std::vector<BotDescriptor> all;
  if (game == GameId::kRrps) {
    all = RrpsPopulation();
    for (auto& d : RrpsConstantBots()) all.push_back(std::move(d));
    all.push_back(RrpsDescriptor<RandBot>("uniform_random",
                                          "uniform random every throw"));
  } else {
    all = LeducHeuristics();
    all.push_back(LeducDescriptor<LeducHeuristicBot>(
        "leduc_heuristic", "rule-based: raise strong hands, call otherwise"));
  }
  for (auto& d : all) {
    if (d.name == name) return d;
  }
  return std::nullopt;
}

}  // namespace csro
