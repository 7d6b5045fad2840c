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

#include "csro/oracle.h"

#include <algorithm>
#include <cmath>
#include <filesystem>

namespace csro {
namespace {

namespace fs = std::filesystem;

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::string FilterKindName(OpponentFilter::Kind k) {
  switch (k) {
    case OpponentFilter::Kind::kNone:
      return "none";
    case OpponentFilter::Kind::kTopK:
      return "top_k";
    case OpponentFilter::Kind::kMinSupport:
      return "min_support";
  }
  return "?";
}

// A program that made it through generation, with its live handle.
struct Generated {
  std::string source;
  PolicyHandle handle;
};

// Shared per-invocation state: the opponent section is computed once.
class Session {
 public:
  explicit Session(const OracleContext& ctx) : ctx_(ctx) {
    ctx.config.Validate();
    if (ctx.bank == nullptr || ctx.backend == nullptr) {
      throw std::invalid_argument("oracle context needs a bank and a backend");
    }
    if (ctx.sigma.bank_ids.size() != ctx.bank->size()) {
      throw std::invalid_argument("meta-strategy does not match the bank");
    }
    if (ctx.config.input_mode == InputMode::kNone) return;
    if (ctx.config.input_mode == InputMode::kDescription &&
        ctx.summarizer == nullptr) {
      throw std::invalid_argument("description mode needs a summarizer");
    }
    for (const auto& [i, p] : FilterOpponents(ctx.sigma.probs, ctx.config.filter)) {
      const PolicyHandle& h = (*ctx.bank)[i];
      OpponentEntry e{h.id(), p, h.source()};
      if (ctx.config.input_mode == InputMode::kDescription) {
        e.payload = ctx.summarizer->Summarize(h.source(), ctx.spec.game_id);
      }
      opponents_.push_back(std::move(e));
    }
  }

  PromptRequest Request(const CandidateRecord* current, EditMode edit) const {
    PromptRequest r;
    r.game = ctx_.spec.game_id;
    r.mode = ctx_.config.input_mode;
    r.opponents = opponents_;
    r.base_program = ctx_.base_program;
    r.edit = edit;
    if (current != nullptr) {
      r.current = ProgramFeedback{current->source,
                                  current->evaluation.per_opponent,
                                  current->evaluation.score};
    }
    return r;
  }

  // Prompt, complete, extract or patch, spawn; retried on any failure.
  std::optional<Generated> Generate(const PromptRequest& request,
                                    const std::string& id,
                                    std::vector<Exchange>* log) const {
    const std::string prompt = ConstructPrompt(request);
    const std::string& base =
        request.current ? request.current->source : request.base_program;
    std::string note;
    for (int attempt = 0; attempt <= ctx_.config.retry_budget; ++attempt) {
      Exchange ex;
      ex.prompt = prompt;
      if (!note.empty()) {
        ex.prompt += "\n\n# Previous answer rejected\n" + note +
                     "\nAnswer again, following the format instructions "
                     "exactly.\n";
      }
      try {
        ex.completion = ctx_.backend->Complete(ex.prompt);
        std::string source = ProgramFromCompletion(ex.completion, base);
        PolicyHandle h = SpawnCodePolicy(id, source, ctx_.spec.game_id, ctx_.host);
        log->push_back(std::move(ex));
        return Generated{std::move(source), std::move(h)};
      } catch (const BackendError& e) {
        ex.error = std::string("backend: ") + e.what();
      } catch (const MalformedGenerationError& e) {
        ex.error = std::string("malformed: ") + e.what();
      } catch (const PatchError& e) {
        ex.error = std::string("patch: ") + e.what();
      } catch (const PolicyError& e) {
        ex.error = std::string("load: ") + e.what();
        if (!e.host_stderr().empty()) ex.error += "\n" + e.host_stderr();
      }
      note = ex.error;
      Log(id + " attempt " + std::to_string(attempt) + " failed: " + ex.error);
      log->push_back(std::move(ex));
    }
    return std::nullopt;
  }

  Evaluation Evaluate(const PolicyHandle& h, int threads) const {
    if (ctx_.evaluator) return ctx_.evaluator(h);
    // Common random numbers: every candidate meets the same deals.
    return EvaluatePolicy(h, ctx_.sigma, *ctx_.bank, ctx_.spec,
                          ctx_.eval_episodes, DeriveSeed(ctx_.seed, {0}),
                          threads, ctx_.match);
  }

  void Log(const std::string& msg) const {
    if (ctx_.log) ctx_.log(msg);
  }

  const OracleContext& ctx() const { return ctx_; }

 private:
  const OracleContext& ctx_;
  std::vector<OpponentEntry> opponents_;
};

bool Valid(const CandidateRecord& c) {
  return c.evaluated && !c.evaluation.rejected && std::isfinite(c.evaluation.score);
}

void Choose(OracleResult* r, int index, const PolicyHandle& h) {
  const CandidateRecord& c = r->candidates[index];
  r->chosen = index;
  r->policy = h;
  r->source = c.source;
  r->evaluated = c.evaluated;
  r->evaluation = c.evaluation;
}

// --- Evolution ---------------------------------------------------------------

struct Island {
  Rng rng;
  std::vector<int> members;  // candidate indices
};

struct StepOutput {
  std::vector<Exchange> exchanges;
  std::optional<CandidateRecord> record;
  std::optional<PolicyHandle> handle;
  bool refinement = false;
};

int SampleParent(Island& island, const std::vector<CandidateRecord>& cands,
                 double scale) {
  const int n = static_cast<int>(island.members.size());
  std::vector<double> s(n);
  for (int i = 0; i < n; ++i) s[i] = cands[island.members[i]].evaluation.score;
  const double sd = n > 1 ? MeanAndStdErr(s).std_err * std::sqrt(n) : 0.0;
  const double t = scale * sd;
  std::vector<double> w(n, 1.0);
  if (t > 0 && std::isfinite(t)) {
    const double top = *std::max_element(s.begin(), s.end());
    for (int i = 0; i < n; ++i) w[i] = std::exp((s[i] - top) / t);
  }
  return island.members[island.rng.Sample(w)];
}

// Keeps at most `cap` members, dropping the lowest score; on ties the most
// recently inserted goes.
void Evict(Island& island, const std::vector<CandidateRecord>& cands, int cap) {
  while (static_cast<int>(island.members.size()) > cap) {
    int worst = 0;
    for (int i = 1; i < static_cast<int>(island.members.size()); ++i) {
      if (cands[island.members[i]].evaluation.score <=
          cands[island.members[worst]].evaluation.score) {
        worst = i;
      }
    }
    island.members.erase(island.members.begin() + worst);
  }
}

}  // namespace

std::string_view OracleVariantName(OracleVariant v) {
  switch (v) {
    case OracleVariant::kZeroShot:
      return "zero_shot";
    case OracleVariant::kLinearRefinement:
      return "linear_refinement";
    case OracleVariant::kEvolutionary:
      return "evolutionary";
  }
  return "?";
}

std::optional<OracleVariant> ParseOracleVariant(std::string_view name) {
  for (auto v : {OracleVariant::kZeroShot, OracleVariant::kLinearRefinement,
                 OracleVariant::kEvolutionary}) {
    if (OracleVariantName(v) == name) return v;
  }
  return std::nullopt;
}

void EvolutionParams::Validate() const {
  if (islands < 1) throw std::invalid_argument("islands must be >= 1");
  if (population_cap < 1) throw std::invalid_argument("population_cap must be >= 1");
  if (!(temperature_scale >= 0)) {
    throw std::invalid_argument("temperature_scale must be >= 0");
  }
  if (migration_period < 0) throw std::invalid_argument("migration_period must be >= 0");
  if (evaluation_budget < 0) {
    throw std::invalid_argument("evaluation_budget must be >= 0");
  }
  if (!(rewrite_probability >= 0 && rewrite_probability <= 1)) {
    throw std::invalid_argument("rewrite_probability must be in [0, 1]");
  }
  if (!island_seeds.empty() && static_cast<int>(island_seeds.size()) != islands) {
    throw std::invalid_argument("island_seeds must have one seed per island");
  }
}

void OracleConfig::Validate() const {
  if (refinement_budget < 0) throw std::invalid_argument("refinement budget M must be >= 0");
  if (retry_budget < 0) throw std::invalid_argument("retry_budget must be >= 0");
  filter.Validate();
  evolution.Validate();
}

OrderedJson OracleConfig::ToJson() const {
  OrderedJson j;
  j["variant"] = OracleVariantName(variant);
  j["input_mode"] = InputModeName(input_mode);
  j["filter"] = {{"kind", FilterKindName(filter.kind)}, {"k", filter.k},
                 {"tau", filter.tau}};
  j["refinement_budget"] = refinement_budget;
  j["retry_budget"] = retry_budget;
  j["evolution"] = {{"islands", evolution.islands},
                    {"population_cap", evolution.population_cap},
                    {"temperature_scale", evolution.temperature_scale},
                    {"migration_period", evolution.migration_period},
                    {"evaluation_budget", evolution.evaluation_budget},
                    {"rewrite_probability", evolution.rewrite_probability},
                    {"island_seeds", evolution.island_seeds}};
  return j;
}

OracleConfig OracleConfig::FromJson(const Json& j) {
  OracleConfig c;
  if (j.contains("variant")) {
    const auto v = ParseOracleVariant(j["variant"].get<std::string>());
    if (!v) throw std::invalid_argument("unknown oracle variant " + j["variant"].dump());
    c.variant = *v;
  }
  if (j.contains("input_mode")) {
    const auto m = ParseInputMode(j["input_mode"].get<std::string>());
    if (!m) throw std::invalid_argument("unknown input mode " + j["input_mode"].dump());
    c.input_mode = *m;
  }
  if (j.contains("filter")) {
    const Json& f = j["filter"];
    c.filter.k = f.value("k", c.filter.k);
    c.filter.tau = f.value("tau", c.filter.tau);
    const std::string kind = f.value("kind", std::string("none"));
    if (kind == "none") {
      c.filter.kind = OpponentFilter::Kind::kNone;
    } else if (kind == "top_k") {
      c.filter.kind = OpponentFilter::Kind::kTopK;
    } else if (kind == "min_support") {
      c.filter.kind = OpponentFilter::Kind::kMinSupport;
    } else {
      throw std::invalid_argument("unknown filter kind " + kind);
    }
  }
  c.refinement_budget = j.value("refinement_budget", c.refinement_budget);
  c.retry_budget = j.value("retry_budget", c.retry_budget);
  if (j.contains("evolution")) {
    const Json& e = j["evolution"];
    auto& p = c.evolution;
    p.islands = e.value("islands", p.islands);
    p.population_cap = e.value("population_cap", p.population_cap);
    p.temperature_scale = e.value("temperature_scale", p.temperature_scale);
    p.migration_period = e.value("migration_period", p.migration_period);
    p.evaluation_budget = e.value("evaluation_budget", p.evaluation_budget);
    p.rewrite_probability = e.value("rewrite_probability", p.rewrite_probability);
    p.island_seeds = e.value("island_seeds", p.island_seeds);
  }
  c.Validate();
  return c;
}

// --- Summaries ---------------------------------------------------------------

PolicySummarizer::PolicySummarizer(LlmBackend* backend, std::string cache_dir,
                                   int retries)
    : backend_(backend), dir_(std::move(cache_dir)), retries_(retries) {
  if (backend_ == nullptr) throw std::invalid_argument("summarizer needs a backend");
  if (!dir_.empty()) fs::create_directories(dir_);
}

std::string PolicySummarizer::SummaryPrompt(const std::string& source,
                                            GameId game) {
  std::string out = "The following Python program is a bot for the game " +
                    std::string(GameName(game)) +
                    ". Summarize its strategy in two or three sentences: how "
                    "it chooses actions, what it reacts to, and any "
                    "predictable pattern an opponent could exploit. Answer "
                    "with the summary only.\n\n```python\n" +
                    source;
  if (out.back() != '\n') out += '\n';
  return out + "```\n";
}

std::string PolicySummarizer::Summarize(const std::string& source, GameId game) {
  if (source.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw std::invalid_argument("cannot summarize an empty program");
  }
  const std::string key = ContentHash(backend_->id() + '\n' +
                                      std::string(GameName(game)) + '\n' + source);
  const fs::path file = dir_.empty() ? fs::path() : fs::path(dir_) / (key + ".txt");
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (auto it = cache_.find(key); it != cache_.end()) {
      ++hits_;
      return it->second;
    }
    if (!dir_.empty() && fs::exists(file)) {
      ++hits_;
      return cache_[key] = ReadFile(file.string());
    }
  }
  const std::string prompt = SummaryPrompt(source, game);
  std::string last;
  for (int attempt = 0; attempt <= retries_; ++attempt) {
    try {
      std::string text = backend_->Complete(prompt);
      const size_t b = text.find_first_not_of(" \t\r\n");
      if (b == std::string::npos) {
        last = "empty summary";
        continue;
      }
      text = text.substr(b, text.find_last_not_of(" \t\r\n") - b + 1);
      std::lock_guard<std::mutex> lock(mu_);
      if (!dir_.empty()) WriteFile(file.string(), text);
      return cache_[key] = text;
    } catch (const BackendError& e) {
      last = e.what();
    }
  }
  throw OracleError("summary failed after retries: " + last);
}

// --- Controllers -------------------------------------------------------------

OracleResult ZeroShot(const OracleContext& ctx) {
  Session s(ctx);
  OracleResult r;
  const std::string id = ctx.id_prefix + "_c0";
  auto g = s.Generate(s.Request(nullptr, EditMode::kPatch), id, &r.exchanges);
  if (!g) {
    throw OracleError("zero-shot generation failed after " +
                      std::to_string(ctx.config.retry_budget + 1) +
                      " attempts: " + r.exchanges.back().error);
  }
  CandidateRecord rec;
  rec.id = id;
  rec.source = g->source;
  rec.exchange = static_cast<int>(r.exchanges.size()) - 1;
  r.candidates.push_back(rec);
  Choose(&r, 0, g->handle);
  return r;
}

OracleResult LinearRefinement(const OracleContext& ctx) {
  Session s(ctx);
  OracleResult r;
  // RRPS refinements ask for the whole program; the Leduc prompt asks for
  // SEARCH/REPLACE blocks either way.
  const EditMode edit =
      ctx.spec.game_id == GameId::kRrps ? EditMode::kRewrite : EditMode::kPatch;
  int incumbent = -1;
  std::optional<PolicyHandle> best;

  auto attempt = [&](int n) {
    const std::string id = ctx.id_prefix + "_c" + std::to_string(n);
    const CandidateRecord* cur = incumbent >= 0 ? &r.candidates[incumbent] : nullptr;
    auto g = s.Generate(s.Request(cur, cur ? edit : EditMode::kPatch), id,
                        &r.exchanges);
    if (!g) return;
    CandidateRecord rec;
    rec.id = id;
    rec.source = g->source;
    rec.parent = incumbent;
    rec.exchange = static_cast<int>(r.exchanges.size()) - 1;
    rec.evaluation = s.Evaluate(g->handle, ctx.threads);
    rec.evaluated = true;
    r.candidates.push_back(rec);
    const int idx = static_cast<int>(r.candidates.size()) - 1;
    s.Log(id + " score " + FormatDouble(rec.evaluation.score));
    if (!Valid(rec)) return;
    if (incumbent < 0 ||
        rec.evaluation.score > r.candidates[incumbent].evaluation.score) {
      incumbent = idx;
      best = g->handle;
    }
  };

  attempt(0);
  int j = 0;
  while (!Terminated(incumbent >= 0 ? r.candidates[incumbent].evaluation.score
                                    : kNegInf,
                     j, ctx.config.refinement_budget)) {
    ++j;
    ++r.refinement_calls;
    attempt(j);
  }
  if (incumbent < 0) {
    throw OracleError("no valid candidate after " + std::to_string(j + 1) +
                      " generations");
  }
  Choose(&r, incumbent, *best);
  return r;
}

OracleResult EvolutionaryRefinement(const OracleContext& ctx) {
  Session s(ctx);
  const EvolutionParams& p = ctx.config.evolution;
  OracleResult r;
  r.island_histories.resize(p.islands);
  std::vector<Island> islands;
  for (int i = 0; i < p.islands; ++i) {
    const uint64_t seed = p.island_seeds.empty() ? DeriveSeed(ctx.seed, {1, uint64_t(i)})
                                                 : p.island_seeds[i];
    islands.push_back({Rng(seed), {}});
  }
  std::vector<PolicyHandle> handles;  // parallel to r.candidates

  // One step of one island. Reads shared state only.
  auto step = [&](int i, const std::string& id, int eval_threads) {
    StepOutput out;
    Island& island = islands[i];
    const CandidateRecord* parent = nullptr;
    EditMode edit = EditMode::kPatch;
    if (!island.members.empty()) {
      parent = &r.candidates[SampleParent(island, r.candidates, p.temperature_scale)];
      if (island.rng.Bernoulli(p.rewrite_probability)) edit = EditMode::kRewrite;
      out.refinement = true;
    }
    auto g = s.Generate(s.Request(parent, edit), id, &out.exchanges);
    if (!g) return out;
    CandidateRecord rec;
    rec.id = id;
    rec.source = g->source;
    rec.island = i;
    rec.exchange = static_cast<int>(out.exchanges.size()) - 1;
    rec.parent = parent ? static_cast<int>(parent - r.candidates.data()) : -1;
    rec.evaluation = s.Evaluate(g->handle, eval_threads);
    rec.evaluated = true;
    out.record = std::move(rec);
    out.handle = g->handle;
    return out;
  };

  auto run_round = [&](const std::vector<int>& active,
                       const std::function<std::string(int)>& id_of) {
    std::vector<StepOutput> outs(active.size());
    const int island_threads =
        std::min<int>(active.size(), ctx.threads > 0 ? ctx.threads : DefaultThreads());
    ParallelFor(static_cast<int>(active.size()), island_threads, [&](int k) {
      outs[k] = step(active[k], id_of(active[k]), island_threads > 1 ? 1 : ctx.threads);
    });
    // Merge at the barrier, in island order.
    for (size_t k = 0; k < active.size(); ++k) {
      auto& o = outs[k];
      if (o.record) o.record->exchange += static_cast<int>(r.exchanges.size());
      for (auto& ex : o.exchanges) r.exchanges.push_back(std::move(ex));
      r.refinement_calls += o.refinement;
      if (!o.record) continue;
      s.Log(o.record->id + " score " + FormatDouble(o.record->evaluation.score));
      r.candidates.push_back(std::move(*o.record));
      handles.push_back(*o.handle);
      const int idx = static_cast<int>(r.candidates.size()) - 1;
      if (!Valid(r.candidates[idx])) continue;
      Island& island = islands[active[k]];
      island.members.push_back(idx);
      r.island_histories[active[k]].push_back(idx);
      Evict(island, r.candidates, p.population_cap);
    }
  };

  std::vector<int> all(p.islands);
  for (int i = 0; i < p.islands; ++i) all[i] = i;
  run_round(all, [&](int i) { return ctx.id_prefix + "_i" + std::to_string(i) + "_seed"; });

  int budget = p.evaluation_budget;
  for (int gen = 0; budget > 0; ++gen) {
    std::vector<int> active(all.begin(), all.begin() + std::min(budget, p.islands));
    budget -= static_cast<int>(active.size());
    run_round(active, [&](int i) {
      return ctx.id_prefix + "_i" + std::to_string(i) + "_g" + std::to_string(gen);
    });
    if (p.migration_period > 0 && p.islands > 1 && (gen + 1) % p.migration_period == 0) {
      // Ring: each island's best goes to the next island.
      std::vector<int> bests(p.islands, -1);
      for (int i = 0; i < p.islands; ++i) {
        for (int m : islands[i].members) {
          if (bests[i] < 0 ||
              r.candidates[m].evaluation.score > r.candidates[bests[i]].evaluation.score) {
            bests[i] = m;
          }
        }
      }
      for (int i = 0; i < p.islands; ++i) {
        if (bests[i] < 0) continue;
        Island& to = islands[(i + 1) % p.islands];
        if (std::find(to.members.begin(), to.members.end(), bests[i]) != to.members.end()) {
          continue;
        }
        to.members.push_back(bests[i]);
        r.island_histories[(i + 1) % p.islands].push_back(bests[i]);
        Evict(to, r.candidates, p.population_cap);
      }
    }
  }

  int best = -1;
  for (int i = 0; i < static_cast<int>(r.candidates.size()); ++i) {
    if (Valid(r.candidates[i]) &&
        (best < 0 || r.candidates[i].evaluation.score > r.candidates[best].evaluation.score)) {
      best = i;
    }
  }
  if (best < 0) throw OracleError("evolutionary search produced no valid candidate");
  Choose(&r, best, handles[best]);
  return r;
}

OracleResult RunOracle(const OracleContext& ctx) {
  switch (ctx.config.variant) {
    case OracleVariant::kZeroShot:
      return ZeroShot(ctx);
    case OracleVariant::kLinearRefinement:
      return LinearRefinement(ctx);
    case OracleVariant::kEvolutionary:
      return EvolutionaryRefinement(ctx);
  }
  throw std::logic_error("unknown oracle variant");
}

OracleResult ExactBestResponse(const OracleContext& ctx,
                               const std::vector<PolicyHandle>& candidates) {
  if (candidates.empty()) throw std::invalid_argument("no candidates");
  if (ctx.bank == nullptr) throw std::invalid_argument("oracle context needs a bank");
  OracleResult r;
  int best = -1;
  for (size_t i = 0; i < candidates.size(); ++i) {
    CandidateRecord rec;
    rec.id = candidates[i].id();
    rec.source = candidates[i].source();
    rec.evaluation = ctx.evaluator
                         ? ctx.evaluator(candidates[i])
                         : EvaluatePolicy(candidates[i], ctx.sigma, *ctx.bank,
                                          ctx.spec, ctx.eval_episodes,
                                          DeriveSeed(ctx.seed, {0}), ctx.threads,
                                          ctx.match);
    rec.evaluated = true;
    r.candidates.push_back(rec);
    if (Valid(rec) && (best < 0 || rec.evaluation.score >
                                       r.candidates[best].evaluation.score)) {
      best = static_cast<int>(i);
    }
  }
  if (best < 0) throw OracleError("every candidate was rejected");
  Choose(&r, best, candidates[best]);
  return r;
}

}  // namespace csro
