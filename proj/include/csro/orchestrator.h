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

#ifndef CSRO_ORCHESTRATOR_H_
#define CSRO_ORCHESTRATOR_H_

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "csro/eval_metrics.h"
#include "csro/llm_backend.h"
#include "csro/oracle.h"

// The CSRO loop: grow a bank of policies by repeatedly solving the empirical
// meta-game and asking an oracle for a response to its equilibrium.
//
// Run directory layout (no timestamps; identical inputs give identical bytes):
//   config.json              the effective configuration
//   checkpoint.json          {"completed_iterations": k}
//   iter_0/                  the initial policy (policy.src, policy.json)
//   iter_<k>/payoff.{csv,json}, sigma.json      meta-game at iteration k
//   iter_<k>/prompt.txt, completion.txt         exchange behind the new policy
//   iter_<k>/llm_log.jsonl                      every exchange, verbatim
//   iter_<k>/policy.src, policy.json, scores.json
//   iter_<k>/eval.json       the sigma mixture against the eval population
//   final/                   payoff and sigma re-solved over the whole bank
//   timeseries/*.csv         see ExportTimeseries
//   summaries/               description-mode summary cache
//   mock_fixtures/           copy of the mock backend fixtures the run reads
namespace csro {

// Source of a policy shipped in policies/ ("leduc_heuristic",
// "leduc_adaptive", "rrps_ensemble").
std::optional<std::string> ShippedPolicySource(std::string_view name);

// RRPS: uniform random. Leduc: the shipped rule-based program (run natively
// unless the host is preferred).
PolicyHandle InitialPolicy(GameId game, const HostConfig& host = {});

struct RunConfig {
  RepeatedGameSpec spec;
  // K.
  int iterations = 5;
  uint64_t seed = 0;
  // Native bot name; empty uses InitialPolicy.
  std::string initial_policy;

  // "llm", or "exact_best_response" over the named native bots.
  std::string oracle_kind = "llm";
  std::vector<std::string> best_response_candidates;
  OracleConfig oracle;
  // Episodes per support member when scoring a candidate; 0 uses the
  // game's default.
  int oracle_episodes = 0;

  int episodes_per_pair = 0;  // 0: DefaultEpisodesPerPair
  double epsilon = 1e-6;

  // Bot names, or "rrps_population" / "leduc_heuristics" for the groups.
  std::vector<std::string> eval_population;
  // 0 disables the per-iteration population evaluation.
  int eval_episodes = kDefaultEvalEpisodes;

  // "mock", "http" or "none".
  std::string llm_backend = "mock";
  std::string mock_dir;
  HttpBackendConfig http;
  std::string summary_cache;  // empty: <output_dir>/summaries

  // Policy host argv; empty reads $CSRO_POLICY_HOST.
  std::string host_command;
  int move_timeout_ms = 1000;

  int threads = 0;
  std::string output_dir = "csro_run";

  static RunConfig Defaults(GameId game);
  void Validate() const;
  // With include_output_dir = false this is what config.json holds, so that
  // two runs that differ only in where they write have identical files.
  OrderedJson ToJson(bool include_output_dir = true) const;
  // Starts from Defaults(game) and rejects unknown keys.
  static RunConfig FromJson(const Json& j);
};

// Sets dotted paths ("oracle.variant=zero_shot", "iterations=3") in a config
// document. Values that parse as JSON are used as such, anything else as a
// string.
void ApplyOverrides(Json& doc, const std::vector<std::string>& overrides);

// A native bot by name (any game's registry).
PolicyHandle NamedPolicy(const std::string& name, GameId game);
std::vector<PolicyHandle> ResolvePopulation(const std::vector<std::string>& names,
                                            GameId game);
std::unique_ptr<LlmBackend> MakeBackend(const RunConfig& config);

// The oracle failed at `iteration`; everything before it is on disk.
class RunError : public std::runtime_error {
 public:
  RunError(int iteration, const std::string& message)
      : std::runtime_error(message), iteration_(iteration) {}
  int iteration() const { return iteration_; }

 private:
  int iteration_;
};

struct RunState {
  int iteration = 0;  // completed iterations
  std::vector<PolicyHandle> bank;
  // Meta-game of the last iteration (bank without the policy it added).
  PayoffMatrix payoff;
  MetaStrategy sigma;
  // Re-solved over the whole bank after the last append.
  PayoffMatrix final_payoff;
  MetaStrategy final_sigma;
  // Backend calls made by this invocation.
  long backend_calls = 0;
};

struct RunHooks {
  // Backend to use instead of the configured one.
  LlmBackend* backend = nullptr;
  // Called after iteration k is on disk; throwing aborts the run there.
  std::function<void(int k)> after_iteration;
  std::function<void(const std::string&)> log;
};

// Runs (or resumes, if output_dir holds a checkpoint) K iterations.
RunState RunCsro(const RunConfig& config, const RunHooks& hooks = {});

// Writes timeseries/{nashconv,oracle,population}.csv from the iteration
// files. Rereading the same directory gives byte-identical output.
//   nashconv.csv   iteration,bank_size,solver_nashconv,nashconv_after_append
//   oracle.csv     iteration,policy_id,score,candidates,refinement_calls,backend_calls
//   population.csv iteration,pop_return,pop_expl,agg_score
void ExportTimeseries(const std::string& run_dir);

// The bank of a run directory through its last checkpointed iteration.
std::vector<PolicyHandle> LoadRunBank(const std::string& run_dir,
                                      const HostConfig& host);

}  // namespace csro

#endif  // CSRO_ORCHESTRATOR_H_
