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

#include "csro/eval_metrics.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <sstream>

namespace csro {
namespace {

// value = mantissa * 10^exponent, from the shortest round-trip form.
struct Decimal {
  __int128 mantissa = 0;
  int exponent = 0;
};

Decimal ToDecimal(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value,
                                 std::chars_format::scientific);
  if (ec != std::errc()) throw std::logic_error("to_chars failed");
  const char* e = std::find(buf, end, 'e');
  Decimal d;
  int digits_after_point = 0;
  bool after_point = false;
  bool negative = false;
  for (const char* p = buf; p < e; ++p) {
    if (*p == '-') {
      negative = true;
    } else if (*p == '.') {
      after_point = true;
    } else {
      d.mantissa = d.mantissa * 10 + (*p - '0');
      if (after_point) ++digits_after_point;
    }
  }
  int exp10 = 0;
  std::from_chars(e + 1 + (e[1] == '+' ? 1 : 0), end, exp10);
  d.exponent = exp10 - digits_after_point;
  if (negative) d.mantissa = -d.mantissa;
  return d;
}

std::string ToString(__int128 v) {
  if (v == 0) return "0";
  const bool negative = v < 0;
  std::string s;
  while (v != 0) {
    const int digit = static_cast<int>(v % 10);
    s += static_cast<char>('0' + (negative ? -digit : digit));
    v /= 10;
  }
  if (negative) s += '-';
  std::reverse(s.begin(), s.end());
  return s;
}

// Exact a - b on the decimal forms, rounded once to double. Falls back to
// binary subtraction when the exponents are too far apart for 128 bits.
double DecimalDifference(double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b)) return a - b;
  if (a == 0 || b == 0) return a - b;
  Decimal x = ToDecimal(a);
  Decimal y = ToDecimal(b);
  Decimal& hi = x.exponent > y.exponent ? x : y;
  const int shift = std::abs(x.exponent - y.exponent);
  if (shift > 20) return a - b;
  for (int i = 0; i < shift; ++i) hi.mantissa *= 10;
  hi.exponent -= shift;
  const std::string text =
      ToString(x.mantissa - y.mantissa) + "e" + std::to_string(x.exponent);
  double out = 0;
  std::from_chars(text.data(), text.data() + text.size(), out);
  return out;
}

}  // namespace

double PopReturn(const std::vector<double>& means) {
  if (means.empty()) throw std::invalid_argument("empty population");
  double sum = 0;
  for (double m : means) sum += m;
  return sum / means.size();
}

double PopExpl(const std::vector<double>& means) {
  if (means.empty()) throw std::invalid_argument("empty population");
  return -*std::min_element(means.begin(), means.end());
}

double AggScore(double pop_return, double pop_expl) {
  return DecimalDifference(pop_return, pop_expl);
}

void EvalReport::Finalize() {
  std::vector<double> means;
  for (const auto& [id, r] : per_opponent) means.push_back(r.mean);
  pop_return = PopReturn(means);
  pop_expl = PopExpl(means);
  agg_score = AggScore(pop_return, pop_expl);
}

std::string EvalReport::CheckConsistency(double tol) const {
  if (per_opponent.empty()) return "no opponents";
  std::vector<double> means;
  for (const auto& [id, r] : per_opponent) means.push_back(r.mean);
  std::ostringstream err;
  if (std::abs(PopReturn(means) - pop_return) > tol) {
    err << "pop_return " << pop_return << " != " << PopReturn(means) << "; ";
  }
  if (std::abs(PopExpl(means) - pop_expl) > tol) {
    err << "pop_expl " << pop_expl << " != " << PopExpl(means) << "; ";
  }
  if (agg_score != AggScore(pop_return, pop_expl)) {
    err << "agg_score " << agg_score << " != pop_return - pop_expl; ";
  }
  return err.str();
}

OrderedJson EvalReport::ToJson() const {
  OrderedJson j = OrderedJson::object();
  j["agent_id"] = agent_id;
  OrderedJson per = OrderedJson::object();
  for (const auto& [id, r] : per_opponent) {
    per[id] = {{"mean_return", r.mean},
               {"stderr", r.std_err},
               {"episodes", r.episodes}};
  }
  j["per_opponent"] = std::move(per);
  j["pop_return"] = pop_return;
  j["pop_expl"] = pop_expl;
  j["agg_score"] = agg_score;
  return j;
}

EvalReport EvalReport::FromJson(const Json& j) {
  EvalReport r;
  r.agent_id = j.at("agent_id").get<std::string>();
  for (const auto& [id, o] : j.at("per_opponent").items()) {
    r.per_opponent[id] = {o.at("mean_return").get<double>(),
                          o.at("stderr").get<double>(),
                          o.at("episodes").get<int>()};
  }
  r.pop_return = j.at("pop_return").get<double>();
  r.pop_expl = j.at("pop_expl").get<double>();
  r.agg_score = j.at("agg_score").get<double>();
  return r;
}

std::string EvalReport::ToCsv() const {
  std::string out = "opponent,mean_return\n";
  for (const auto& [id, r] : per_opponent) {
    out += id + "," + FormatDouble(r.mean) + "\n";
  }
  out += "PopReturn," + FormatDouble(pop_return) + "\n";
  out += "PopExpl," + FormatDouble(pop_expl) + "\n";
  out += "AggScore," + FormatDouble(agg_score) + "\n";
  return out;
}

EvalReport EvaluateAgainstPopulation(const PolicyHandle& agent,
                                     const std::vector<PolicyHandle>& population,
                                     const RepeatedGameSpec& spec, int episodes,
                                     uint64_t seed, int threads,
                                     const MatchOptions& match) {
  if (population.empty()) throw std::invalid_argument("empty population");
  if (episodes < 1) throw std::invalid_argument("episodes must be positive");
  std::map<std::string, int> seen;
  for (const auto& p : population) {
    if (seen[p.id()]++) {
      throw std::invalid_argument("duplicate population id " + p.id());
    }
  }
  const int n = static_cast<int>(population.size());
  std::vector<double> returns(static_cast<size_t>(n) * episodes);
  ParallelFor(n * episodes, threads > 0 ? threads : DefaultThreads(),
              [&](int k) {
                const int j = k / episodes;
                const int e = k % episodes;
                const uint64_t s = DeriveSeed(seed, {static_cast<uint64_t>(j),
                                                     static_cast<uint64_t>(e)});
                try {
                  returns[k] =
                      e % 2 == 0
                          ? PlayMatch(spec, agent, population[j], s, match)
                                .returns[0]
                          : PlayMatch(spec, population[j], agent, s, match)
                                .returns[1];
                } catch (const MatchError& err) {
                  throw PopulationEvalError(
                      population[j].id(),
                      "against " + population[j].id() + ": " + err.what());
                }
              });
  EvalReport report;
  report.agent_id = agent.id();
  for (int j = 0; j < n; ++j) {
    const SampleStats s = MeanAndStdErr(std::vector<double>(
        returns.begin() + j * episodes, returns.begin() + (j + 1) * episodes));
    report.per_opponent[population[j].id()] = {s.mean, s.std_err, episodes};
  }
  report.Finalize();
  return report;
}

PolicyHandle MixturePolicy(const std::string& id,
                           const std::vector<PolicyHandle>& members,
                           const std::vector<double>& probs) {
  if (members.empty() || members.size() != probs.size()) {
    throw std::invalid_argument("mixture needs one probability per member");
  }
  double total = 0;
  for (double p : probs) {
    if (!(p >= 0)) throw std::invalid_argument("negative mixture weight");
    total += p;
  }
  if (!(total > 0)) throw std::invalid_argument("mixture weights sum to 0");
  for (const auto& m : members) {
    if (m.game() != members[0].game()) {
      throw std::invalid_argument("mixture members play different games");
    }
  }
  // A composite has no single source, so it reports as native.
  return PolicyHandle(id, members[0].game(), PolicyKind::kNative,
                      [members, probs](uint64_t seed) {
                        Rng rng(DeriveSeed(seed, {0}));
                        const int k = rng.Sample(probs);
                        return members[k].NewAgent(DeriveSeed(seed, {1}));
                      });
}

}  // namespace csro
