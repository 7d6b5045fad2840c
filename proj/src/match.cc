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

#include "csro/match.h"

#include <memory>
#include <string>
#include <vector>

namespace csro {
namespace {

char MoveLetter(rrps::Move m) { return rrps::MoveName(m)[0]; }

// Applies the violation policy for one side of a match.
class SideGuard {
 public:
  SideGuard(const MatchOptions& options, int side, std::array<int, 2>& counts)
      : options_(options), side_(side), counts_(counts) {}

  // Records a violation at `round`; throws if the match must stop.
  void Violation(int round, MatchError::Kind kind, const std::string& what,
                 std::optional<PolicyError::Kind> policy_error = std::nullopt) {
    if (options_.mode == ViolationMode::kStrict) {
      throw MatchError(kind, side_, round, Describe(round, what), policy_error);
    }
    if (++counts_[side_] > options_.max_violations) {
      throw MatchError(MatchError::Kind::kTooManyViolations, side_, round,
                       Describe(round, "too many violations, last: " + what),
                       policy_error);
    }
  }

  // Wraps a call into the agent; converts PolicyErrors per the mode.
  // Returns false if the call failed but play may continue.
  template <typename F>
  bool Call(int round, F&& f) {
    try {
      f();
      return true;
    } catch (const PolicyError& e) {
      if (!e.recoverable()) {
        throw MatchError(MatchError::Kind::kPolicyFailure, side_, round,
                         Describe(round, e.what()), e.kind());
      }
      Violation(round, MatchError::Kind::kPolicyFailure, e.what(), e.kind());
      return false;
    }
  }

 private:
  std::string Describe(int round, const std::string& what) const {
    return "side " + std::to_string(side_) + ", round " +
           std::to_string(round) + ": " + what;
  }

  const MatchOptions& options_;
  int side_;
  std::array<int, 2>& counts_;
};

void PlayRrps(const RepeatedGameSpec& spec,
              std::array<std::unique_ptr<Agent>, 2>& agents,
              std::array<SideGuard, 2>& guards, MatchResult& result) {
  OrderedJson moves = OrderedJson::array();
  std::optional<rrps::Move> last[2];
  long long total = 0;
  for (int round = 0; round < spec.num_rounds; ++round) {
    rrps::Move chosen[2];
    for (int side = 0; side < 2; ++side) {
      const rrps::Observation obs{last[side], last[1 - side]};
      std::string reply;
      const bool ok =
          guards[side].Call(round, [&] { reply = agents[side]->Act(obs); });
      std::optional<rrps::Move> move;
      if (ok) {
        move = rrps::ParseMove(reply);
        if (!move) {
          guards[side].Violation(round, MatchError::Kind::kIllegalAction,
                                 "illegal move '" + reply + "'");
        }
      }
      chosen[side] = move.value_or(rrps::Move::kRock);
    }
    total += rrps::StagePayoff(chosen[0], chosen[1]);
    last[0] = chosen[0];
    last[1] = chosen[1];
    moves.push_back(std::string{MoveLetter(chosen[0]), MoveLetter(chosen[1])});
  }
  result.returns = {static_cast<double>(total), static_cast<double>(-total)};
  result.transcript["moves"] = std::move(moves);
}

void PlayLeduc(const RepeatedGameSpec& spec,
               std::array<std::unique_ptr<Agent>, 2>& agents,
               std::array<SideGuard, 2>& guards, Rng& rng,
               MatchResult& result) {
  const std::vector<leduc::Rank> deck = leduc::StandardDeck();
  // seat_of[side] for the first hand; alternates afterwards.
  const int first_seat_of_a = rng.UniformInt(2);
  result.transcript["first_seat_of_a"] = first_seat_of_a;
  OrderedJson hands = OrderedJson::array();
  long long total_a = 0;
  for (int hand = 0; hand < spec.num_rounds; ++hand) {
    const int seat_of_a = (first_seat_of_a + hand) % 2;
    const std::array<int, 2> seat_of = {seat_of_a, 1 - seat_of_a};
    int side_in_seat[2];
    side_in_seat[seat_of[0]] = 0;
    side_in_seat[seat_of[1]] = 1;
    for (int side = 0; side < 2; ++side) {
      guards[side].Call(hand, [&] { agents[side]->Restart(seat_of[side]); });
    }
    leduc::HandState state = leduc::HandState::Deal(spec.stake_mode, deck, rng);
    while (!state.IsTerminal()) {
      const int seat = state.CurrentPlayer();
      const int side = side_in_seat[seat];
      const Observation obs = state.ObservationFor(seat);
      std::string reply;
      const bool ok =
          guards[side].Call(hand, [&] { reply = agents[side]->Act(obs); });
      std::optional<leduc::Action> action;
      if (ok) {
        action = leduc::ParseAction(reply);
        if (!action || !state.IsLegal(*action)) {
          guards[side].Violation(hand, MatchError::Kind::kIllegalAction,
                                 "illegal action '" + reply + "' at '" +
                                     state.BettingString() + "'");
          action.reset();
        }
      }
      if (!action) action = state.LegalActions().front();
      state.Apply(*action);
    }
    const auto seat_returns = state.Returns();
    for (int side = 0; side < 2; ++side) {
      const leduc::Observation outcome = state.ObservationFor(seat_of[side]);
      guards[side].Call(hand, [&] { agents[side]->ReceiveOutcome(outcome); });
    }
    total_a += seat_returns[seat_of[0]];

    OrderedJson record = OrderedJson::object();
    record["seat_of_a"] = seat_of_a;
    record["cards"] = {leduc::RankName(state.private_card(0)),
                       leduc::RankName(state.private_card(1))};
    record["public_card"] = leduc::RankName(state.hidden_public_card());
    record["betting"] = state.BettingString();
    record["returns"] = {seat_returns[seat_of[0]], seat_returns[seat_of[1]]};
    hands.push_back(std::move(record));
  }
  result.returns = {static_cast<double>(total_a),
                    static_cast<double>(-total_a)};
  result.transcript["hands"] = std::move(hands);
}

}  // namespace

MatchResult PlayMatch(const RepeatedGameSpec& spec, const PolicyHandle& a,
                      const PolicyHandle& b, uint64_t seed,
                      const MatchOptions& options) {
  spec.Validate();
  if (a.game() != spec.game_id || b.game() != spec.game_id) {
    throw std::invalid_argument("policy game does not match the match spec");
  }
  MatchResult result;
  result.seed = seed;
  result.transcript = OrderedJson::object();
  result.transcript["game"] = GameName(spec.game_id);
  if (spec.game_id == GameId::kRepeatedLeduc) {
    result.transcript["stake_mode"] = leduc::StakeModeName(spec.stake_mode);
  }
  result.transcript["num_rounds"] = spec.num_rounds;
  result.transcript["seed"] = seed;
  result.transcript["policies"] = {a.id(), b.id()};

  std::array<std::unique_ptr<Agent>, 2> agents;
  const PolicyHandle* handles[2] = {&a, &b};
  for (int side = 0; side < 2; ++side) {
    try {
      agents[side] = handles[side]->NewAgent(DeriveSeed(seed, {side + 1ULL}));
    } catch (const PolicyError& e) {
      throw MatchError(MatchError::Kind::kPolicyFailure, side, 0,
                       "side " + std::to_string(side) +
                           ": could not start policy: " + e.what(),
                       e.kind());
    }
  }
  std::array<SideGuard, 2> guards = {SideGuard(options, 0, result.violations),
                                     SideGuard(options, 1, result.violations)};
  Rng rng(DeriveSeed(seed, {0}));

  if (spec.game_id == GameId::kRrps) {
    PlayRrps(spec, agents, guards, result);
  } else {
    PlayLeduc(spec, agents, guards, rng, result);
  }
  result.transcript["violations"] = result.violations;
  result.transcript["returns"] = result.returns;
  return result;
}

}  // namespace csro
