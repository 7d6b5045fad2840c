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

#include "csro/policy.h"

namespace csro {

std::string_view PolicyErrorKindName(PolicyError::Kind kind) {
  switch (kind) {
    case PolicyError::Kind::kSpawn:
      return "spawn";
    case PolicyError::Kind::kHandshakeTimeout:
      return "handshake_timeout";
    case PolicyError::Kind::kLoad:
      return "load";
    case PolicyError::Kind::kTimeout:
      return "timeout";
    case PolicyError::Kind::kMalformed:
      return "malformed";
    case PolicyError::Kind::kAgentError:
      return "agent_error";
    case PolicyError::Kind::kCrashed:
      return "crashed";
    case PolicyError::Kind::kUnavailable:
      return "unavailable";
  }
  return "unknown";
}

std::string_view PolicyKindName(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kNative:
      return "NATIVE";
    case PolicyKind::kCfrTable:
      return "CFR_TABLE";
    case PolicyKind::kCode:
      return "CODE";
  }
  return "?";
}

PolicyHandle::PolicyHandle(std::string id, GameId game, PolicyKind kind,
                           AgentFactory factory, std::string source)
    : id_(std::move(id)),
      game_(game),
      kind_(kind),
      factory_(std::make_shared<const AgentFactory>(std::move(factory))),
      source_(std::move(source)) {
  if (kind_ == PolicyKind::kCode && source_.empty()) {
    throw std::invalid_argument("CODE policy '" + id_ + "' has empty source");
  }
}

std::unique_ptr<Agent> PolicyHandle::NewAgent(uint64_t seed) const {
  return (*factory_)(seed);
}

PolicyHandle PolicyHandle::WithId(std::string id) const {
  PolicyHandle copy = *this;
  copy.id_ = std::move(id);
  return copy;
}

}  // namespace csro
