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

#ifndef CSRO_META_GAME_H_
#define CSRO_META_GAME_H_

#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "csro/match.h"

namespace csro {

// Empirical meta-game over a policy bank. values(i, j) estimates the mean
// return of bank[i] against bank[j]; the matrix is exactly antisymmetric with
// a zero diagonal.
struct PayoffMatrix {
  std::vector<std::string> bank_ids;
  Eigen::MatrixXd values;
  // Standard error of each entry (sample sd / sqrt(episodes)).
  Eigen::MatrixXd std_err;
  int episodes_per_pair = 0;

  int size() const { return static_cast<int>(bank_ids.size()); }
  OrderedJson ToJson() const;
  // Header row "policy,<id>...", then one row per policy.
  std::string ToCsv() const;
};

struct MetaStrategy {
  std::vector<std::string> bank_ids;
  Eigen::VectorXd probs;

  // Indices with positive probability, ascending.
  std::vector<int> Support() const;
  OrderedJson ToJson() const;
};

// A match failed while estimating an entry.
class PayoffError : public std::runtime_error {
 public:
  PayoffError(int row, int col, const std::string& message)
      : std::runtime_error(message), row_(row), col_(col) {}
  int row() const { return row_; }
  int col() const { return col_; }

 private:
  int row_;
  int col_;
};

struct PayoffOptions {
  int episodes_per_pair = 20;
  uint64_t seed = 0;
  // Worker threads; 0 picks a default.
  int threads = 0;
  MatchOptions match = {ViolationMode::kSubstitute, 3};
};

// Default episode counts per game (20 RRPS, 50 Leduc).
int DefaultEpisodesPerPair(GameId game);

// Plays every unordered pair episodes_per_pair times, alternating which
// policy is passed first. Episode e of pair (i, j), i < j, uses seed
// DeriveSeed(seed, {i, j, e}), so the result does not depend on scheduling
// and incremental computation equals recomputation. If `previous` covers a
// prefix of the bank (same ids, same episodes and seed), its entries are
// reused.
PayoffMatrix ComputePayoffMatrix(const std::vector<PolicyHandle>& bank,
                                 const RepeatedGameSpec& spec,
                                 const PayoffOptions& options,
                                 const PayoffMatrix* previous = nullptr);

// max(0, max_i (U sigma)_i). Zero iff sigma is a symmetric equilibrium.
double MetaNashConv(const Eigen::VectorXd& sigma, const Eigen::MatrixXd& u);

struct SolverOptions {
  double epsilon = 1e-6;
  // Probabilities below this are dropped and the rest renormalized.
  double support_threshold = 1e-9;
  long max_iterations = 2'000'000;
};

// Symmetric equilibrium of an antisymmetric U by regret-matching+ self-play
// with alternating updates and linear averaging, with periodic attempts to
// polish the average onto the exact equilibrium of its support. Stops once
// MetaNashConv <= epsilon. Throws std::invalid_argument if U is not
// antisymmetric and std::runtime_error if the budget runs out.
Eigen::VectorXd SolveSymmetricZeroSum(const Eigen::MatrixXd& u,
                                      const SolverOptions& options = {});
MetaStrategy ComputeMetaEquilibrium(const PayoffMatrix& u,
                                    const SolverOptions& options = {});

// Candidate evaluation against a meta-strategy.
struct OpponentScore {
  std::string id;
  double sigma = 0;
  double mean = 0;
  double std_err = 0;
};

struct Evaluation {
  // sum_i sigma_i * mean_i, or -infinity when rejected.
  double score = -std::numeric_limits<double>::infinity();
  std::vector<OpponentScore> per_opponent;  // support members, bank order
  bool rejected = false;
  std::string rejection_reason;
};

// Plays the candidate against every support member of sigma, `episodes`
// matches each with seats alternating. Episode e against bank[i] uses
// DeriveSeed(seed, {i, e}) whatever sigma is, so the score is linear in
// sigma. A candidate that breaks a match (too many violations, host crash)
// is rejected with score -infinity.
Evaluation EvaluatePolicy(const PolicyHandle& candidate,
                          const MetaStrategy& sigma,
                          const std::vector<PolicyHandle>& bank,
                          const RepeatedGameSpec& spec, int episodes,
                          uint64_t seed, int threads = 0,
                          const MatchOptions& match = {ViolationMode::kSubstitute,
                                                       3});

}  // namespace csro

#endif  // CSRO_META_GAME_H_
