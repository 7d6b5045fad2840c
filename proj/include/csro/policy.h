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

#ifndef CSRO_POLICY_H_
#define CSRO_POLICY_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "csro/game.h"

namespace csro {

// One playing instance of a policy. Agents are stateful for the duration of a
// single match and are never shared between concurrent matches.
class Agent {
 public:
  virtual ~Agent() = default;

  // Leduc only: called before every hand with the seat for that hand.
  virtual void Restart(int /*player_id*/) {}
  // Leduc only: the terminal observation of the hand just played.
  virtual void ReceiveOutcome(const leduc::Observation& /*outcome*/) {}
  // Returns an action string ("ROCK", "CALL", ...). Legality is checked by the
  // match engine, not here.
  virtual std::string Act(const Observation& obs) = 0;
};

// Failure talking to a policy. Kinds are distinguishable so callers can tell
// a broken program from a slow one.
class PolicyError : public std::runtime_error {
 public:
  enum class Kind {
    kSpawn,             // could not start the host process
    kHandshakeTimeout,  // INIT not acknowledged in time
    kLoad,              // host reported the source failed to load
    kTimeout,           // per-move deadline exceeded
    kMalformed,         // response was not a valid protocol message
    kAgentError,        // the agent raised while handling a request
    kCrashed,           // the host process exited
    kUnavailable,       // no executor can run this source
  };

  PolicyError(Kind kind, const std::string& message,
              std::string host_stderr = "")
      : std::runtime_error(message),
        kind_(kind),
        host_stderr_(std::move(host_stderr)) {}

  Kind kind() const { return kind_; }
  const std::string& host_stderr() const { return host_stderr_; }
  // Whether the agent can still be used after this error.
  bool recoverable() const {
    return kind_ == Kind::kAgentError || kind_ == Kind::kTimeout;
  }

 private:
  Kind kind_;
  std::string host_stderr_;
};

std::string_view PolicyErrorKindName(PolicyError::Kind kind);

enum class PolicyKind { kNative, kCfrTable, kCode };
std::string_view PolicyKindName(PolicyKind kind);

struct PolicyMetadata {
  int creation_iteration = 0;
  std::string oracle_variant;
  std::vector<double> score_history;
};

// A playable strategy. Cheap to copy; copies share the agent factory.
class PolicyHandle {
 public:
  using AgentFactory =
      std::function<std::unique_ptr<Agent>(uint64_t seed)>;

  PolicyHandle(std::string id, GameId game, PolicyKind kind,
               AgentFactory factory, std::string source = "");

  const std::string& id() const { return id_; }
  GameId game() const { return game_; }
  PolicyKind kind() const { return kind_; }
  // Program text for kCode handles, optional documentation otherwise.
  const std::string& source() const { return source_; }
  PolicyMetadata& metadata() { return metadata_; }
  const PolicyMetadata& metadata() const { return metadata_; }

  // Fresh agent for one match. `seed` drives any randomness inside it.
  std::unique_ptr<Agent> NewAgent(uint64_t seed) const;

  PolicyHandle WithId(std::string id) const;

 private:
  std::string id_;
  GameId game_;
  PolicyKind kind_;
  std::shared_ptr<const AgentFactory> factory_;
  std::string source_;
  PolicyMetadata metadata_;
};

}  // namespace csro

#endif  // CSRO_POLICY_H_
