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

#ifndef CSRO_ORACLE_H_
#define CSRO_ORACLE_H_

#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "csro/code_policy.h"
#include "csro/llm_backend.h"
#include "csro/meta_game.h"
#include "csro/prompts.h"

// Response oracles: turn a meta-strategy over the bank into a new program
// policy by prompting a backend, optionally refining against evaluations.
namespace csro {

enum class OracleVariant { kZeroShot, kLinearRefinement, kEvolutionary };
std::string_view OracleVariantName(OracleVariant v);
std::optional<OracleVariant> ParseOracleVariant(std::string_view name);

struct EvolutionParams {
  int islands = 4;
  int population_cap = 8;
  // Parent sampling temperature is this times the standard deviation of the
  // island's scores; a zero temperature samples uniformly.
  double temperature_scale = 0.5;
  // Generations between ring migrations; 0 disables migration.
  int migration_period = 5;
  // Mutation evaluations after seeding, across all islands.
  int evaluation_budget = 40;
  // Chance of asking for a full rewrite instead of a patch.
  double rewrite_probability = 0.1;
  // Per-island RNG seeds. Empty: derived from the oracle seed.
  std::vector<uint64_t> island_seeds;

  void Validate() const;
};

struct OracleConfig {
  OracleVariant variant = OracleVariant::kLinearRefinement;
  InputMode input_mode = InputMode::kCode;
  OpponentFilter filter;
  // M: refinement generations after the seed candidate.
  int refinement_budget = 5;
  EvolutionParams evolution;
  // Extra attempts after a failed generation (backend error, no program,
  // failed patch, program that will not load).
  int retry_budget = 3;

  void Validate() const;
  OrderedJson ToJson() const;
  // Missing keys keep their defaults.
  static OracleConfig FromJson(const Json& j);
};

// The oracle could not produce any usable policy.
class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Natural-language summaries of programs, for description mode. Cached by
// (backend id, game, source) in memory and, if a directory is given, on
// disk. Failures are never cached.
class PolicySummarizer {
 public:
  explicit PolicySummarizer(LlmBackend* backend, std::string cache_dir = "",
                            int retries = 3);

  // Throws std::invalid_argument on empty source, OracleError once retries
  // are exhausted.
  std::string Summarize(const std::string& source, GameId game);
  static std::string SummaryPrompt(const std::string& source, GameId game);
  long cache_hits() const { return hits_; }

 private:
  LlmBackend* backend_;
  std::string dir_;
  int retries_;
  std::mutex mu_;
  std::map<std::string, std::string> cache_;
  long hits_ = 0;
};

// Everything one oracle invocation needs.
struct OracleContext {
  RepeatedGameSpec spec;
  const std::vector<PolicyHandle>* bank = nullptr;
  MetaStrategy sigma;
  OracleConfig config;
  LlmBackend* backend = nullptr;
  // Required in description mode.
  PolicySummarizer* summarizer = nullptr;
  HostConfig host;
  // Leduc: the program patched when there is no current one.
  std::string base_program;
  int eval_episodes = 20;
  uint64_t seed = 0;
  // Candidate ids are "<prefix>_c<n>" (or "<prefix>_i<island>_g<gen>").
  std::string id_prefix = "candidate";
  int threads = 0;
  MatchOptions match = {ViolationMode::kSubstitute, 3};
  // Replaces EvaluatePolicy when set. For controller tests.
  std::function<Evaluation(const PolicyHandle&)> evaluator;
  std::function<void(const std::string&)> log;
};

// One backend exchange, failed or not.
struct Exchange {
  std::string prompt;
  std::string completion;
  std::string error;  // empty on success
};

struct CandidateRecord {
  std::string id;
  std::string source;
  int island = -1;
  int parent = -1;  // index into OracleResult::candidates
  int exchange = -1;  // the exchange that produced it
  bool evaluated = false;
  Evaluation evaluation;
};

struct OracleResult {
  std::optional<PolicyHandle> policy;
  std::string source;
  bool evaluated = false;
  Evaluation evaluation;
  std::vector<CandidateRecord> candidates;
  std::vector<Exchange> exchanges;
  // Generations requested after the seed candidate(s).
  int refinement_calls = 0;
  // Candidate indices inserted into each island, in order.
  std::vector<std::vector<int>> island_histories;

  // Index of the returned candidate in `candidates`.
  int chosen = -1;
};

// Stop refining once the utility is non-negative or j reaches M.
inline bool Terminated(double u, int j, int m) { return u >= 0 || j >= m; }

// One generation, spawned but not evaluated.
OracleResult ZeroShot(const OracleContext& ctx);
// Seed by zero-shot, then regenerate with the incumbent's program and scores
// as feedback until Terminated. A new program replaces the incumbent only if
// its score is strictly higher.
OracleResult LinearRefinement(const OracleContext& ctx);
// Island model. Returns the best candidate evaluated, ties to the earliest.
OracleResult EvolutionaryRefinement(const OracleContext& ctx);
OracleResult RunOracle(const OracleContext& ctx);

// Test oracle: the best of a fixed set of policies against sigma (ties to
// the lowest index). Uses no backend.
OracleResult ExactBestResponse(const OracleContext& ctx,
                               const std::vector<PolicyHandle>& candidates);

}  // namespace csro

#endif  // CSRO_ORACLE_H_
