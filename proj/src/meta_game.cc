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

#include "csro/meta_game.h"

#include <algorithm>
#include <cmath>
#include <set>

namespace csro {
namespace {

// Return of `row` against `col` in one episode; even episodes seat `row`
// first.
double PlayEpisode(const RepeatedGameSpec& spec, const PolicyHandle& row,
                   const PolicyHandle& col, int episode, uint64_t seed,
                   const MatchOptions& match) {
  if (episode % 2 == 0) {
    return PlayMatch(spec, row, col, seed, match).returns[0];
  }
  return PlayMatch(spec, col, row, seed, match).returns[1];
}

int Threads(int requested) {
  return requested > 0 ? requested : DefaultThreads();
}

void CheckAntisymmetric(const Eigen::MatrixXd& u) {
  if (u.rows() != u.cols()) {
    throw std::invalid_argument("payoff matrix is not square");
  }
  const double scale = std::max(1.0, u.cwiseAbs().maxCoeff());
  if ((u + u.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
    throw std::invalid_argument("payoff matrix is not antisymmetric");
  }
}

// Drops tiny probabilities and renormalizes.
Eigen::VectorXd Truncate(Eigen::VectorXd p, double threshold) {
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p[i] < threshold) p[i] = 0;
  }
  return p / p.sum();
}

// Equalizer on the given support: solves U_SS x = 0, sum x = 1 in the least
// squares sense. Returns nothing if the solution is not a distribution.
std::optional<Eigen::VectorXd> Polish(const Eigen::MatrixXd& u,
                                      const std::vector<int>& support) {
  const int k = static_cast<int>(support.size());
  Eigen::MatrixXd m(k + 1, k);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(k + 1);
  for (int r = 0; r < k; ++r) {
    for (int c = 0; c < k; ++c) m(r, c) = u(support[r], support[c]);
  }
  m.row(k).setOnes();
  b[k] = 1;
  const Eigen::VectorXd x = m.completeOrthogonalDecomposition().solve(b);
  const double scale = std::max(1.0, u.cwiseAbs().maxCoeff());
  if (!x.allFinite() || (m * x - b).norm() > 1e-9 * scale ||
      x.minCoeff() < -1e-12) {
    return std::nullopt;
  }
  Eigen::VectorXd full = Eigen::VectorXd::Zero(u.rows());
  for (int i = 0; i < k; ++i) full[support[i]] = std::max(0.0, x[i]);
  return full / full.sum();
}

// Tries supports {i : avg_i >= t * max(avg)} for a ladder of t.
std::optional<Eigen::VectorXd> TryPolish(const Eigen::MatrixXd& u,
                                         const Eigen::VectorXd& avg,
                                         const SolverOptions& options) {
  std::set<std::vector<int>> tried;
  const double top = avg.maxCoeff();
  for (double t = 0.3; t > 1e-7; t /= 3) {
    std::vector<int> support;
    for (Eigen::Index i = 0; i < avg.size(); ++i) {
      if (avg[i] >= t * top) support.push_back(static_cast<int>(i));
    }
    if (!tried.insert(support).second) continue;
    auto sigma = Polish(u, support);
    if (!sigma) continue;
    Eigen::VectorXd p = Truncate(*sigma, options.support_threshold);
    if (MetaNashConv(p, u) <= options.epsilon) return p;
  }
  return std::nullopt;
}

}  // namespace

OrderedJson PayoffMatrix::ToJson() const {
  OrderedJson j = OrderedJson::object();
  j["bank_ids"] = bank_ids;
  j["episodes_per_pair"] = episodes_per_pair;
  OrderedJson vals = OrderedJson::array();
  OrderedJson errs = OrderedJson::array();
  for (int i = 0; i < size(); ++i) {
    OrderedJson vrow = OrderedJson::array();
    OrderedJson erow = OrderedJson::array();
    for (int k = 0; k < size(); ++k) {
      vrow.push_back(values(i, k));
      erow.push_back(std_err(i, k));
    }
    vals.push_back(std::move(vrow));
    errs.push_back(std::move(erow));
  }
  j["values"] = std::move(vals);
  j["stderr"] = std::move(errs);
  return j;
}

std::string PayoffMatrix::ToCsv() const {
  std::string out = "policy";
  for (const auto& id : bank_ids) out += "," + id;
  out += "\n";
  for (int i = 0; i < size(); ++i) {
    out += bank_ids[i];
    for (int k = 0; k < size(); ++k) out += "," + FormatDouble(values(i, k));
    out += "\n";
  }
  return out;
}

std::vector<int> MetaStrategy::Support() const {
  std::vector<int> s;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    if (probs[i] > 0) s.push_back(static_cast<int>(i));
  }
  return s;
}

OrderedJson MetaStrategy::ToJson() const {
  OrderedJson j = OrderedJson::object();
  j["bank_ids"] = bank_ids;
  j["probs"] = std::vector<double>(probs.data(), probs.data() + probs.size());
  return j;
}

int DefaultEpisodesPerPair(GameId game) {
  return game == GameId::kRrps ? 20 : 50;
}

PayoffMatrix ComputePayoffMatrix(const std::vector<PolicyHandle>& bank,
                                 const RepeatedGameSpec& spec,
                                 const PayoffOptions& options,
                                 const PayoffMatrix* previous) {
  if (bank.empty()) throw std::invalid_argument("empty policy bank");
  if (options.episodes_per_pair < 1) {
    throw std::invalid_argument("episodes_per_pair must be >= 1");
  }
  const int n = static_cast<int>(bank.size());
  PayoffMatrix m;
  m.episodes_per_pair = options.episodes_per_pair;
  for (const auto& p : bank) m.bank_ids.push_back(p.id());
  m.values = Eigen::MatrixXd::Zero(n, n);
  m.std_err = Eigen::MatrixXd::Zero(n, n);

  // Length of the reusable prefix.
  int known = 0;
  if (previous != nullptr &&
      previous->episodes_per_pair == options.episodes_per_pair &&
      previous->size() <= n &&
      std::equal(previous->bank_ids.begin(), previous->bank_ids.end(),
                 m.bank_ids.begin())) {
    known = previous->size();
    m.values.topLeftCorner(known, known) = previous->values;
    m.std_err.topLeftCorner(known, known) = previous->std_err;
  }

  std::vector<std::pair<int, int>> pairs;
  for (int j = known; j < n; ++j) {
    for (int i = 0; i < j; ++i) pairs.emplace_back(i, j);
  }
  const int episodes = options.episodes_per_pair;
  std::vector<double> samples(pairs.size() * episodes);
  ParallelFor(static_cast<int>(samples.size()), Threads(options.threads),
              [&](int task) {
                const auto [i, j] = pairs[task / episodes];
                const int e = task % episodes;
                const uint64_t seed = DeriveSeed(
                    options.seed, {static_cast<uint64_t>(i),
                                   static_cast<uint64_t>(j),
                                   static_cast<uint64_t>(e)});
                try {
                  samples[task] = PlayEpisode(spec, bank[i], bank[j], e, seed,
                                              options.match);
                } catch (const MatchError& err) {
                  throw PayoffError(i, j,
                                    "payoff entry (" + bank[i].id() + ", " +
                                        bank[j].id() + "), episode " +
                                        std::to_string(e) + ": " + err.what());
                }
              });
  for (size_t p = 0; p < pairs.size(); ++p) {
    const auto [i, j] = pairs[p];
    const SampleStats s = MeanAndStdErr(std::vector<double>(
        samples.begin() + p * episodes, samples.begin() + (p + 1) * episodes));
    m.values(i, j) = s.mean;
    m.values(j, i) = -s.mean;
    m.std_err(i, j) = m.std_err(j, i) = s.std_err;
  }
  return m;
}

double MetaNashConv(const Eigen::VectorXd& sigma, const Eigen::MatrixXd& u) {
  if (u.rows() != u.cols() || sigma.size() != u.cols()) {
    throw std::invalid_argument("meta strategy size does not match matrix");
  }
  if (u.size() == 0) return 0;
  return std::max(0.0, (u * sigma).maxCoeff());
}

Eigen::VectorXd SolveSymmetricZeroSum(const Eigen::MatrixXd& u,
                                      const SolverOptions& options) {
  CheckAntisymmetric(u);
  const Eigen::Index n = u.rows();
  if (n == 0) throw std::invalid_argument("empty payoff matrix");
  const Eigen::VectorXd uniform = Eigen::VectorXd::Constant(n, 1.0 / n);
  if (MetaNashConv(uniform, u) <= options.epsilon) return uniform;

  // Row player maximizes x'Uy, column player minimizes it.
  Eigen::VectorXd rx = Eigen::VectorXd::Zero(n), ry = rx;
  Eigen::VectorXd x = uniform, y = uniform;
  Eigen::VectorXd sx = Eigen::VectorXd::Zero(n), sy = sx;
  auto regret_match = [&](const Eigen::VectorXd& r) -> Eigen::VectorXd {
    const double total = r.sum();
    return total > 0 ? Eigen::VectorXd(r / total) : uniform;
  };

  long next_check = 16;
  for (long t = 1; t <= options.max_iterations; ++t) {
    const Eigen::VectorXd uy = u * y;
    rx = (rx + uy - Eigen::VectorXd::Constant(n, x.dot(uy))).cwiseMax(0.0);
    x = regret_match(rx);
    const Eigen::VectorXd xu = u.transpose() * x;
    ry = (ry - xu + Eigen::VectorXd::Constant(n, xu.dot(y))).cwiseMax(0.0);
    y = regret_match(ry);
    sx += static_cast<double>(t) * x;
    sy += static_cast<double>(t) * y;
    if (t == next_check || t == options.max_iterations) {
      next_check = std::min(2 * next_check, next_check + 4096);
      const Eigen::VectorXd avg = (sx / sx.sum() + sy / sy.sum()) / 2;
      const Eigen::VectorXd p = Truncate(avg, options.support_threshold);
      if (MetaNashConv(p, u) <= options.epsilon) return p;
      if (auto polished = TryPolish(u, avg, options)) return *polished;
    }
  }
  throw std::runtime_error("meta solver did not reach the certificate");
}

MetaStrategy ComputeMetaEquilibrium(const PayoffMatrix& u,
                                    const SolverOptions& options) {
  MetaStrategy s;
  s.bank_ids = u.bank_ids;
  s.probs = SolveSymmetricZeroSum(u.values, options);
  return s;
}

Evaluation EvaluatePolicy(const PolicyHandle& candidate,
                          const MetaStrategy& sigma,
                          const std::vector<PolicyHandle>& bank,
                          const RepeatedGameSpec& spec, int episodes,
                          uint64_t seed, int threads,
                          const MatchOptions& match) {
  if (static_cast<size_t>(sigma.probs.size()) != bank.size()) {
    throw std::invalid_argument("meta strategy does not match the bank");
  }
  if (episodes < 1) throw std::invalid_argument("episodes must be >= 1");
  const std::vector<int> support = sigma.Support();
  std::vector<double> samples(support.size() * episodes);
  std::vector<std::string> failures(samples.size());
  ParallelFor(static_cast<int>(samples.size()), Threads(threads), [&](int task) {
    const int i = support[task / episodes];
    const int e = task % episodes;
    const uint64_t s =
        DeriveSeed(seed, {static_cast<uint64_t>(i), static_cast<uint64_t>(e)});
    try {
      samples[task] = PlayEpisode(spec, candidate, bank[i], e, s, match);
    } catch (const MatchError& err) {
      // Side of the candidate in this episode.
      const int candidate_side = e % 2 == 0 ? 0 : 1;
      if (err.side() != candidate_side) {
        throw PayoffError(-1, i, "opponent " + bank[i].id() +
                                     " failed: " + err.what());
      }
      failures[task] = "vs " + bank[i].id() + ", episode " +
                       std::to_string(e) + ": " + err.what();
    }
  });

  Evaluation ev;
  for (const auto& f : failures) {
    if (!f.empty()) {
      ev.rejected = true;
      ev.rejection_reason = f;
      return ev;
    }
  }
  ev.score = 0;
  for (size_t k = 0; k < support.size(); ++k) {
    const SampleStats s = MeanAndStdErr(std::vector<double>(
        samples.begin() + k * episodes, samples.begin() + (k + 1) * episodes));
    OpponentScore o;
    o.id = bank[support[k]].id();
    o.sigma = sigma.probs[support[k]];
    o.mean = s.mean;
    o.std_err = s.std_err;
    ev.score += o.sigma * o.mean;
    ev.per_opponent.push_back(o);
  }
  return ev;
}

}  // namespace csro
