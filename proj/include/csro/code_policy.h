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

#ifndef CSRO_CODE_POLICY_H_
#define CSRO_CODE_POLICY_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "csro/policy.h"

// Code policies: program text executed out of process by a policy host.
//
// The host is started once per match as
//   <policy_host_cmd...> --source <file> --game <rrps|leduc>
// and spoken to over newline-delimited JSON on its stdin/stdout. Every
// message is {"type": T, "payload": P, "seq": n} and every request gets
// exactly one response echoing its seq:
//
//   INIT        {"game", "seed"}        -> INIT {"status": "ok"}
//   RESTART     {"player_id"}           -> RESTART {}
//   ACT_REQUEST <observation>           -> ACT_RESPONSE "<action>"
//   OUTCOME     <terminal observation>  -> OUTCOME {}
//
// Any request may instead be answered by ERROR {"message", "traceback"}.
// An ERROR to INIT is a load failure.
//
// A source containing a line "# native-policy: <bot name>" is bound to the
// named native bot instead (unless HostConfig::prefer_host is set and a host
// is configured). Mock fixtures and the shipped starting policies use this so
// that runs need no host.
namespace csro {

struct HostConfig {
  // argv prefix of the host; empty means no host is available.
  std::vector<std::string> command;
  int move_timeout_ms = 1000;
  int handshake_timeout_ms = 5000;
  // Where source files handed to the host are written. Empty: a directory
  // under the system temp path.
  std::string scratch_dir;
  // Run natively bound sources through the host when one is configured.
  bool prefer_host = false;

  // Splits on whitespace; an empty string gives an empty command.
  static std::vector<std::string> SplitCommand(std::string_view command);
  // Reads the command from $CSRO_POLICY_HOST.
  static HostConfig FromEnvironment();
};

// Bot name from a "# native-policy: <name>" line, if any.
std::optional<std::string> NativeBindingName(std::string_view source);

// Builds a CODE handle. Validates the source up front: empty source and an
// unknown native binding raise PolicyError(kLoad); a host-run source is
// probed once (spawn plus INIT), so spawn, handshake and load failures
// surface here with the host's stderr attached. Each match then gets its own
// host process, killed when the match's agent is destroyed.
PolicyHandle SpawnCodePolicy(std::string id, std::string source, GameId game,
                             const HostConfig& host);

// Envelope helper shared with the test host.
OrderedJson WireMessage(std::string_view type, OrderedJson payload,
                        long long seq);

}  // namespace csro

#endif  // CSRO_CODE_POLICY_H_
