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

#ifndef CSRO_UTIL_H_
#define CSRO_UTIL_H_

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace csro {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

// SplitMix64 finalizer. Used to derive independent seeds from a base seed and
// a path of integers (pair index, episode, side, ...), so results never depend
// on scheduling order.
uint64_t Mix64(uint64_t x);
uint64_t DeriveSeed(uint64_t seed, std::initializer_list<uint64_t> path);

// Seeded random stream. The distributions are implemented here rather than
// via <random> distributions, whose outputs differ across standard libraries.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(Mix64(seed)) {}

  uint64_t NextU64() { return engine_(); }
  // Uniform in [0, n). n must be positive.
  int UniformInt(int n);
  // Uniform in [0, 1).
  double UniformReal();
  bool Bernoulli(double p) { return UniformReal() < p; }
  // Samples an index with probability proportional to weights (nonnegative,
  // positive sum).
  int Sample(std::span<const double> weights);

 private:
  std::mt19937_64 engine_;
};

// FNV-1a, hex encoded. Stable content key for caches and fixture lookup.
std::string ContentHash(std::string_view text);

// Runs fn(i) for i in [0, n) on up to `threads` workers. Exceptions are
// rethrown on the caller (the one with the lowest index wins).
void ParallelFor(int n, int threads, const std::function<void(int)>& fn);

// Number of worker threads to use when a config says 0.
int DefaultThreads();

std::string ReadFile(const std::string& path);
void WriteFile(const std::string& path, std::string_view contents);

// Shortest round-trip formatting of a double ("%.17g" trimmed), used for every
// number written to CSV so that files are byte-stable.
std::string FormatDouble(double value);

struct SampleStats {
  double mean = 0;
  double std_err = 0;  // sample sd / sqrt(n); 0 when n < 2
};
SampleStats MeanAndStdErr(const std::vector<double>& xs);

}  // namespace csro

#endif  // CSRO_UTIL_H_
