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

#ifndef CSRO_MATCH_H_
#define CSRO_MATCH_H_

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "csro/game.h"
#include "csro/policy.h"

namespace csro {

// How the engine reacts when a policy fails to produce a legal action.
enum class ViolationMode {
  // First failure aborts the match with a MatchError.
  kStrict,
  // The move is replaced by the first legal action in the order
  // FOLD < CALL < RAISE (ROCK for RRPS) and counted; the match aborts once a
  // side exceeds MatchOptions::max_violations.
  kSubstitute,
};

struct MatchOptions {
  ViolationMode mode = ViolationMode::kStrict;
  int max_violations = 3;
};

class MatchError : public std::runtime_error {
 public:
  enum class Kind { kPolicyFailure, kIllegalAction, kTooManyViolations };

  MatchError(Kind kind, int side, int round, const std::string& message,
             std::optional<PolicyError::Kind> policy_error = std::nullopt)
      : std::runtime_error(message),
        kind_(kind),
        side_(side),
        round_(round),
        policy_error_(policy_error) {}

  Kind kind() const { return kind_; }
  // 0 for the first policy passed to PlayMatch, 1 for the second.
  int side() const { return side_; }
  // Stage game index (throw or hand), zero based.
  int round() const { return round_; }
  const std::optional<PolicyError::Kind>& policy_error() const {
    return policy_error_;
  }

 private:
  Kind kind_;
  int side_;
  int round_;
  std::optional<PolicyError::Kind> policy_error_;
};

struct MatchResult {
  // Indexed by side (policy a, policy b). Always sums to exactly zero.
  std::array<double, 2> returns = {0, 0};
  std::array<int, 2> violations = {0, 0};
  // Complete, deterministic record of the match; see README for the schema.
  OrderedJson transcript;
  uint64_t seed = 0;
};

// Plays spec.num_rounds stage games between a and b. For Leduc the seat of
// policy a in the first hand is drawn from `seed` and seats alternate every
// hand after that. Fully reproducible from (a, b, seed).
MatchResult PlayMatch(const RepeatedGameSpec& spec, const PolicyHandle& a,
                      const PolicyHandle& b, uint64_t seed,
                      const MatchOptions& options = {});

}  // namespace csro

#endif  // CSRO_MATCH_H_
