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

#ifndef CSRO_EVAL_METRICS_H_
#define CSRO_EVAL_METRICS_H_

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "csro/match.h"

// Population metrics: PopReturn (mean return against a population), PopExpl
// (negated worst per-opponent return) and AggScore = PopReturn - PopExpl.
namespace csro {

// Unweighted mean. Throws std::invalid_argument on an empty input.
double PopReturn(const std::vector<double>& per_opponent_means);
// -min. Throws std::invalid_argument on an empty input.
double PopExpl(const std::vector<double>& per_opponent_means);
// pop_return - pop_expl, computed on the shortest decimal forms of the two
// inputs so that reported figures subtract exactly (193.2 - 67.2 == 126.0).
double AggScore(double pop_return, double pop_expl);

struct OpponentResult {
  double mean = 0;
  double std_err = 0;
  int episodes = 0;
};

struct EvalReport {
  std::string agent_id;
  std::map<std::string, OpponentResult> per_opponent;  // alphabetical
  double pop_return = 0;
  double pop_expl = 0;
  double agg_score = 0;

  // Fills the three metrics from per_opponent.
  void Finalize();
  // Empty when the metrics agree with per_opponent (to `tol`) and
  // agg_score == AggScore(pop_return, pop_expl); otherwise a description.
  std::string CheckConsistency(double tol = 1e-12) const;

  OrderedJson ToJson() const;
  static EvalReport FromJson(const Json& j);
  // "opponent,mean_return" rows, then PopReturn/PopExpl/AggScore footers.
  std::string ToCsv() const;
};

// A match against `opponent` aborted because of it or of the agent.
class PopulationEvalError : public std::runtime_error {
 public:
  PopulationEvalError(std::string opponent, const std::string& message)
      : std::runtime_error(message), opponent_(std::move(opponent)) {}
  const std::string& opponent() const { return opponent_; }

 private:
  std::string opponent_;
};

inline constexpr int kDefaultEvalEpisodes = 20;

// Plays `episodes` matches against each population member. Episode e against
// population[j] uses seed DeriveSeed(seed, {j, e}), with seats alternating
// (the agent goes first on even e).
EvalReport EvaluateAgainstPopulation(
    const PolicyHandle& agent, const std::vector<PolicyHandle>& population,
    const RepeatedGameSpec& spec, int episodes = kDefaultEvalEpisodes,
    uint64_t seed = 0, int threads = 0,
    const MatchOptions& match = {ViolationMode::kSubstitute, 3});

// A policy that draws one member per match (with probability `probs`) and
// plays it for the whole match.
PolicyHandle MixturePolicy(const std::string& id,
                           const std::vector<PolicyHandle>& members,
                           const std::vector<double>& probs);

}  // namespace csro

#endif  // CSRO_EVAL_METRICS_H_
