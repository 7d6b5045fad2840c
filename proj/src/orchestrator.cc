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

#include "csro/orchestrator.h"

#include <algorithm>
#include <filesystem>
#include <set>

#include "csro/populations.h"

namespace csro {
namespace {

namespace fs = std::filesystem;

// Every key of `given` must exist in `known`; objects are checked
// recursively.
void CheckKeys(const Json& given, const Json& known, const std::string& path) {
  if (!given.is_object()) return;
  for (const auto& [key, value] : given.items()) {
    const std::string here = path.empty() ? key : path + "." + key;
    if (!known.contains(key)) throw std::invalid_argument("unknown config key: " + here);
    if (value.is_object() && known[key].is_object()) CheckKeys(value, known[key], here);
  }
}

std::string Iter(int k) { return "iter_" + std::to_string(k); }

OrderedJson ScoreJson(double x) {
  return std::isfinite(x) ? OrderedJson(x) : OrderedJson(nullptr);
}

OrderedJson SigmaJson(const MetaStrategy& s, double nashconv) {
  OrderedJson j = s.ToJson();
  j["meta_nashconv"] = nashconv;
  return j;
}

Eigen::MatrixXd ReadValues(const Json& payoff) {
  const auto& rows = payoff.at("values");
  const int n = static_cast<int>(rows.size());
  Eigen::MatrixXd u(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) u(i, j) = rows[i][j].get<double>();
  }
  return u;
}

Json ReadJson(const fs::path& p) { return Json::parse(ReadFile(p.string())); }

void WriteJson(const fs::path& p, const OrderedJson& j) {
  WriteFile(p.string(), j.dump(2) + "\n");
}

// How a bank member is rebuilt on resume.
OrderedJson PolicyJson(const PolicyHandle& h, const std::string& bot) {
  OrderedJson j;
  j["id"] = h.id();
  j["kind"] = PolicyKindName(h.kind());
  j["bot"] = bot;
  j["creation_iteration"] = h.metadata().creation_iteration;
  j["oracle_variant"] = h.metadata().oracle_variant;
  return j;
}

void WritePolicy(const fs::path& dir, const PolicyHandle& h, const std::string& bot) {
  WriteFile((dir / "policy.src").string(), h.source());
  WriteJson(dir / "policy.json", PolicyJson(h, bot));
}

PolicyHandle LoadPolicy(const fs::path& dir, GameId game, const HostConfig& host) {
  const Json j = ReadJson(dir / "policy.json");
  const std::string id = j.at("id");
  const std::string bot = j.at("bot");
  PolicyHandle h = bot.empty()
                       ? SpawnCodePolicy(id, ReadFile((dir / "policy.src").string()),
                                         game, host)
                       : NamedPolicy(bot, game).WithId(id);
  h.metadata().creation_iteration = j.at("creation_iteration");
  h.metadata().oracle_variant = j.at("oracle_variant");
  return h;
}

OrderedJson ScoresJson(const OracleResult& r, const std::string& kind, long calls) {
  OrderedJson j;
  j["oracle"] = kind;
  j["chosen"] = r.chosen;
  j["policy_id"] = r.policy->id();
  j["score"] = r.evaluated ? ScoreJson(r.evaluation.score) : OrderedJson(nullptr);
  j["refinement_calls"] = r.refinement_calls;
  j["backend_calls"] = calls;
  OrderedJson cands = OrderedJson::array();
  for (const auto& c : r.candidates) {
    OrderedJson o;
    o["id"] = c.id;
    o["island"] = c.island;
    o["parent"] = c.parent;
    o["evaluated"] = c.evaluated;
    o["score"] = c.evaluated ? ScoreJson(c.evaluation.score) : OrderedJson(nullptr);
    o["rejected"] = c.evaluation.rejected;
    o["rejection_reason"] = c.evaluation.rejection_reason;
    OrderedJson per = OrderedJson::array();
    for (const auto& s : c.evaluation.per_opponent) {
      per.push_back({{"id", s.id}, {"sigma", s.sigma}, {"mean", s.mean},
                     {"std_err", s.std_err}});
    }
    o["per_opponent"] = std::move(per);
    cands.push_back(std::move(o));
  }
  j["candidates"] = std::move(cands);
  return j;
}

PolicyHandle SigmaMixture(const std::string& id, const MetaStrategy& s,
                          const std::vector<PolicyHandle>& bank) {
  std::vector<PolicyHandle> members;
  std::vector<double> probs;
  for (int i : s.Support()) {
    members.push_back(bank[i]);
    probs.push_back(s.probs[i]);
  }
  return MixturePolicy(id, members, probs);
}

}  // namespace

PolicyHandle InitialPolicy(GameId game, const HostConfig& host) {
  if (game == GameId::kRrps) return UniformRandomRrpsPolicy();
  return SpawnCodePolicy("leduc_heuristic", *ShippedPolicySource("leduc_heuristic"),
                         game, host);
}

PolicyHandle NamedPolicy(const std::string& name, GameId game) {
  const auto d = FindBot(game, name);
  if (!d) {
    throw std::invalid_argument("unknown " + std::string(GameName(game)) +
                                " bot: " + name);
  }
  return d->factory();
}

std::vector<PolicyHandle> ResolvePopulation(const std::vector<std::string>& names,
                                            GameId game) {
  std::vector<PolicyHandle> out;
  for (const auto& n : names) {
    if (n == "rrps_population" && game == GameId::kRrps) {
      for (const auto& d : RrpsPopulation()) out.push_back(d.factory());
    } else if (n == "leduc_heuristics" && game == GameId::kRepeatedLeduc) {
      for (const auto& d : LeducHeuristics()) out.push_back(d.factory());
    } else {
      out.push_back(NamedPolicy(n, game));
    }
  }
  return out;
}

std::unique_ptr<LlmBackend> MakeBackend(const RunConfig& c) {
  if (c.llm_backend == "mock") {
    if (c.mock_dir.empty()) throw std::invalid_argument("llm.mock_dir is not set");
    return std::make_unique<MockBackend>(c.mock_dir);
  }
  if (c.llm_backend == "http") return std::make_unique<HttpBackend>(c.http);
  return nullptr;
}

// --- Configuration ------------------------------------------------------------

RunConfig RunConfig::Defaults(GameId game) {
  RunConfig c;
  c.spec = RepeatedGameSpec::Default(game);
  c.eval_population = {game == GameId::kRrps ? "rrps_population" : "leduc_heuristics"};
  return c;
}

void RunConfig::Validate() const {
  spec.Validate();
  oracle.Validate();
  if (iterations < 1) throw std::invalid_argument("iterations (K) must be >= 1");
  if (oracle_kind != "llm" && oracle_kind != "exact_best_response") {
    throw std::invalid_argument("oracle.kind must be llm or exact_best_response");
  }
  if (oracle_kind == "exact_best_response") {
    if (best_response_candidates.empty()) {
      throw std::invalid_argument("exact_best_response needs oracle.candidates");
    }
    for (const auto& n : best_response_candidates) NamedPolicy(n, spec.game_id);
  }
  if (llm_backend != "mock" && llm_backend != "http" && llm_backend != "none") {
    throw std::invalid_argument("llm.backend must be mock, http or none");
  }
  if (oracle_episodes < 0 || episodes_per_pair < 0 || eval_episodes < 0) {
    throw std::invalid_argument("episode counts must be >= 0");
  }
  if (!(epsilon > 0)) throw std::invalid_argument("meta.epsilon must be positive");
  if (!initial_policy.empty()) NamedPolicy(initial_policy, spec.game_id);
  if (eval_episodes > 0) ResolvePopulation(eval_population, spec.game_id);
  if (output_dir.empty()) throw std::invalid_argument("output_dir is empty");
}

OrderedJson RunConfig::ToJson(bool include_output_dir) const {
  OrderedJson j;
  j["game"] = GameName(spec.game_id);
  j["rounds"] = spec.num_rounds;
  j["stake_mode"] = leduc::StakeModeName(spec.stake_mode);
  j["iterations"] = iterations;
  j["seed"] = seed;
  j["initial_policy"] = initial_policy;
  OrderedJson o;
  o["kind"] = oracle_kind;
  o["candidates"] = best_response_candidates;
  o["episodes"] = oracle_episodes;
  const OrderedJson oj = oracle.ToJson();
  for (const auto& [k, v] : oj.items()) o[k] = v;
  j["oracle"] = std::move(o);
  j["meta"] = {{"episodes_per_pair", episodes_per_pair}, {"epsilon", epsilon}};
  j["eval"] = {{"population", eval_population}, {"episodes", eval_episodes}};
  j["llm"] = {{"backend", llm_backend},
              {"mock_dir", mock_dir},
              {"endpoint", http.endpoint},
              {"model", http.model},
              {"api_key_env", http.api_key_env},
              {"timeout_s", http.timeout_s},
              {"max_retries", http.max_retries},
              {"temperature", http.temperature},
              {"max_tokens", http.max_tokens},
              {"summary_cache", summary_cache}};
  j["host"] = {{"command", host_command}, {"move_timeout_ms", move_timeout_ms}};
  j["threads"] = threads;
  if (include_output_dir) j["output_dir"] = output_dir;
  return j;
}

RunConfig RunConfig::FromJson(const Json& given) {
  const std::string game_name = given.value("game", std::string("rrps"));
  const auto game = ParseGameId(game_name);
  if (!game) throw std::invalid_argument("unknown game: " + game_name);
  Json j = Json::parse(Defaults(*game).ToJson().dump());
  CheckKeys(given, j, "");
  j.merge_patch(given);

  RunConfig c = Defaults(*game);
  const auto mode = leduc::ParseStakeMode(j["stake_mode"].get<std::string>());
  if (!mode) throw std::invalid_argument("unknown stake_mode " + j["stake_mode"].dump());
  c.spec.num_rounds = j["rounds"];
  c.spec.stake_mode = *mode;
  c.iterations = j["iterations"];
  c.seed = j["seed"];
  c.initial_policy = j["initial_policy"];
  const Json& o = j["oracle"];
  c.oracle_kind = o["kind"];
  c.best_response_candidates = o["candidates"].get<std::vector<std::string>>();
  c.oracle_episodes = o["episodes"];
  c.oracle = OracleConfig::FromJson(o);
  c.episodes_per_pair = j["meta"]["episodes_per_pair"];
  c.epsilon = j["meta"]["epsilon"];
  c.eval_population = j["eval"]["population"].get<std::vector<std::string>>();
  c.eval_episodes = j["eval"]["episodes"];
  const Json& l = j["llm"];
  c.llm_backend = l["backend"];
  c.mock_dir = l["mock_dir"];
  c.http.endpoint = l["endpoint"];
  c.http.model = l["model"];
  c.http.api_key_env = l["api_key_env"];
  c.http.timeout_s = l["timeout_s"];
  c.http.max_retries = l["max_retries"];
  c.http.temperature = l["temperature"];
  c.http.max_tokens = l["max_tokens"];
  c.summary_cache = l["summary_cache"];
  c.host_command = j["host"]["command"];
  c.move_timeout_ms = j["host"]["move_timeout_ms"];
  c.threads = j["threads"];
  c.output_dir = j["output_dir"];
  c.Validate();
  return c;
}

void ApplyOverrides(Json& doc, const std::vector<std::string>& overrides) {
  for (std::string o : overrides) {
    if (o.rfind("--", 0) == 0) o = o.substr(2);
    const size_t eq = o.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw std::invalid_argument("override must be key=value: " + o);
    }
    const std::string value = o.substr(eq + 1);
    Json parsed = Json::parse(value, nullptr, false);
    if (parsed.is_discarded()) parsed = value;
    Json* at = &doc;
    std::string path = o.substr(0, eq);
    for (size_t dot; (dot = path.find('.')) != std::string::npos;) {
      at = &(*at)[path.substr(0, dot)];
      path = path.substr(dot + 1);
    }
    (*at)[path] = parsed;
  }
}

// --- The loop -------------------------------------------------------------------

RunState RunCsro(const RunConfig& config, const RunHooks& hooks) {
  config.Validate();
  const fs::path dir(config.output_dir);
  fs::create_directories(dir);
  const GameId game = config.spec.game_id;
  auto log = [&](const std::string& m) {
    if (hooks.log) hooks.log(m);
  };

  HostConfig host = HostConfig::FromEnvironment();
  if (!config.host_command.empty()) {
    host.command = HostConfig::SplitCommand(config.host_command);
  }
  host.move_timeout_ms = config.move_timeout_ms;

  std::unique_ptr<LlmBackend> owned;
  LlmBackend* backend = hooks.backend;
  if (backend == nullptr && config.oracle_kind == "llm") {
    RunConfig effective = config;
    if (config.llm_backend == "mock" && !config.mock_dir.empty()) {
      // The run reads its fixtures from its own copy, taken once at start.
      const fs::path copy = dir / "mock_fixtures";
      if (!fs::exists(copy)) {
        if (!fs::is_directory(config.mock_dir)) {
          throw std::invalid_argument("mock directory not found: " + config.mock_dir);
        }
        fs::create_directories(dir);
        fs::copy(config.mock_dir, copy, fs::copy_options::recursive);
      }
      effective.mock_dir = copy.string();
    }
    owned = MakeBackend(effective);
    backend = owned.get();
    if (backend == nullptr) throw std::invalid_argument("the llm oracle needs a backend");
  }
  const long calls_at_start = backend ? backend->calls() : 0;
  std::unique_ptr<PolicySummarizer> summarizer;
  if (config.oracle_kind == "llm" && config.oracle.input_mode == InputMode::kDescription) {
    summarizer = std::make_unique<PolicySummarizer>(
        backend, config.summary_cache.empty() ? (dir / "summaries").string()
                                              : config.summary_cache);
  }

  // Resume or start.
  const OrderedJson persisted = config.ToJson(false);
  RunState st;
  std::vector<std::string> bots;  // native bot name per bank member, or ""
  const fs::path checkpoint = dir / "checkpoint.json";
  if (fs::exists(checkpoint)) {
    Json saved = ReadJson(dir / "config.json");
    Json now = Json::parse(persisted.dump());
    for (Json* j : {&saved, &now}) {
      j->erase("iterations");
      j->erase("threads");
    }
    if (saved != now) {
      throw std::invalid_argument("run directory " + dir.string() +
                                  " holds a run with a different configuration");
    }
    st.iteration = ReadJson(checkpoint).at("completed_iterations");
    for (int k = 0; k <= st.iteration; ++k) {
      st.bank.push_back(LoadPolicy(dir / Iter(k), game, host));
      bots.push_back(ReadJson(dir / Iter(k) / "policy.json").at("bot"));
    }
    log("resuming after iteration " + std::to_string(st.iteration));
  } else {
    const std::string bot = config.initial_policy.empty()
                                ? (game == GameId::kRrps ? "uniform_random" : "")
                                : config.initial_policy;
    PolicyHandle init = config.initial_policy.empty()
                            ? InitialPolicy(game, host)
                            : NamedPolicy(config.initial_policy, game);
    init.metadata().oracle_variant = "initial";
    WritePolicy(dir / Iter(0), init, bot);
    st.bank.push_back(init);
    bots.push_back(bot);
    WriteJson(checkpoint, {{"completed_iterations", 0}});
  }
  WriteJson(dir / "config.json", persisted);

  PayoffOptions popts;
  popts.episodes_per_pair = config.episodes_per_pair > 0
                                ? config.episodes_per_pair
                                : DefaultEpisodesPerPair(game);
  popts.seed = DeriveSeed(config.seed, {1});
  popts.threads = config.threads;
  SolverOptions sopts;
  sopts.epsilon = config.epsilon;
  const int oracle_episodes = config.oracle_episodes > 0 ? config.oracle_episodes
                                                         : DefaultEpisodesPerPair(game);
  const auto population = config.eval_episodes > 0
                              ? ResolvePopulation(config.eval_population, game)
                              : std::vector<PolicyHandle>{};
  const std::string base_program =
      game == GameId::kRepeatedLeduc ? st.bank[0].source() : "";
  auto evaluate_sigma = [&](const std::string& id, const MetaStrategy& s,
                            const fs::path& out) {
    if (population.empty()) return;
    const EvalReport rep = EvaluateAgainstPopulation(
        SigmaMixture(id, s, st.bank), population, config.spec,
        config.eval_episodes, DeriveSeed(config.seed, {3}), config.threads);
    WriteJson(out / "eval.json", rep.ToJson());
  };

  std::optional<PayoffMatrix> previous;
  for (int k = st.iteration + 1; k <= config.iterations; ++k) {
    const fs::path it = dir / Iter(k);
    fs::remove_all(it);
    // Meta-game over the current bank.
    st.payoff = ComputePayoffMatrix(st.bank, config.spec, popts,
                                    previous ? &*previous : nullptr);
    st.sigma = ComputeMetaEquilibrium(st.payoff, sopts);
    const double nashconv = MetaNashConv(st.sigma.probs, st.payoff.values);
    WriteFile((it / "payoff.csv").string(), st.payoff.ToCsv());
    WriteJson(it / "payoff.json", st.payoff.ToJson());
    WriteJson(it / "sigma.json", SigmaJson(st.sigma, nashconv));
    log("iteration " + std::to_string(k) + ": bank " + std::to_string(st.bank.size()) +
        ", meta nashconv " + FormatDouble(nashconv));

    // Response.
    OracleContext ctx;
    ctx.spec = config.spec;
    ctx.bank = &st.bank;
    ctx.sigma = st.sigma;
    ctx.config = config.oracle;
    ctx.backend = backend;
    ctx.summarizer = summarizer.get();
    ctx.host = host;
    ctx.base_program = base_program;
    ctx.eval_episodes = oracle_episodes;
    ctx.seed = DeriveSeed(config.seed, {2, static_cast<uint64_t>(k)});
    ctx.id_prefix = "iter" + std::to_string(k);
    ctx.threads = config.threads;
    ctx.log = hooks.log;
    const long calls_before = backend ? backend->calls() : 0;
    OracleResult r;
    std::string bot;
    try {
      if (config.oracle_kind == "exact_best_response") {
        std::vector<PolicyHandle> cands;
        std::set<std::string> used;
        for (const auto& h : st.bank) used.insert(h.id());
        for (const auto& n : config.best_response_candidates) {
          PolicyHandle h = NamedPolicy(n, game);
          if (used.count(h.id())) h = h.WithId(n + "_iter" + std::to_string(k));
          cands.push_back(h);
        }
        ctx.backend = nullptr;
        r = ExactBestResponse(ctx, cands);
        bot = config.best_response_candidates[r.chosen];
      } else {
        r = RunOracle(ctx);
      }
    } catch (const OracleError& e) {
      fs::remove_all(it);
      throw RunError(k, "oracle failed at iteration " + std::to_string(k) + ": " +
                            e.what());
    }
    const long calls = (backend ? backend->calls() : 0) - calls_before;

    PolicyHandle policy = *r.policy;
    policy.metadata().creation_iteration = k;
    policy.metadata().oracle_variant = config.oracle_kind == "llm"
                                           ? std::string(OracleVariantName(config.oracle.variant))
                                           : config.oracle_kind;
    for (const auto& c : r.candidates) {
      if (c.evaluated) policy.metadata().score_history.push_back(c.evaluation.score);
    }
    const CandidateRecord& chosen = r.candidates[r.chosen];
    if (chosen.exchange >= 0) {
      WriteFile((it / "prompt.txt").string(), r.exchanges[chosen.exchange].prompt);
      WriteFile((it / "completion.txt").string(),
                r.exchanges[chosen.exchange].completion);
    }
    std::string llm_log;
    for (const auto& ex : r.exchanges) {
      llm_log += OrderedJson{{"prompt", ex.prompt},
                             {"completion", ex.completion},
                             {"error", ex.error}}
                     .dump() +
                 "\n";
    }
    WriteFile((it / "llm_log.jsonl").string(), llm_log);
    WritePolicy(it, policy, bot);
    WriteJson(it / "scores.json", ScoresJson(r, policy.metadata().oracle_variant, calls));
    log("iteration " + std::to_string(k) + ": added " + policy.id() +
        (r.evaluated ? " (score " + FormatDouble(r.evaluation.score) + ")" : ""));

    evaluate_sigma("sigma_iter" + std::to_string(k), st.sigma, it);
    st.bank.push_back(policy);
    bots.push_back(bot);
    st.iteration = k;
    WriteJson(checkpoint, {{"completed_iterations", k}});
    previous = st.payoff;
    if (hooks.after_iteration) hooks.after_iteration(k);
  }

  // Re-solve over the whole bank; the last iteration's sigma is kept too.
  const fs::path fin = dir / "final";
  fs::remove_all(fin);
  st.final_payoff =
      ComputePayoffMatrix(st.bank, config.spec, popts, previous ? &*previous : nullptr);
  st.final_sigma = ComputeMetaEquilibrium(st.final_payoff, sopts);
  WriteFile((fin / "payoff.csv").string(), st.final_payoff.ToCsv());
  WriteJson(fin / "payoff.json", st.final_payoff.ToJson());
  WriteJson(fin / "sigma.json",
            SigmaJson(st.final_sigma, MetaNashConv(st.final_sigma.probs,
                                                   st.final_payoff.values)));
  fs::copy_file(dir / Iter(st.iteration) / "sigma.json", fin / "sigma_last_iteration.json");
  if (st.sigma.bank_ids.empty()) {
    // Fully resumed: reload the last iteration's meta-game.
    const Json s = ReadJson(dir / Iter(st.iteration) / "sigma.json");
    st.sigma.bank_ids = s.at("bank_ids").get<std::vector<std::string>>();
    const auto p = s.at("probs").get<std::vector<double>>();
    st.sigma.probs = Eigen::Map<const Eigen::VectorXd>(p.data(), p.size());
  }
  evaluate_sigma("sigma_final", st.final_sigma, fin);
  ExportTimeseries(dir.string());
  st.backend_calls = (backend ? backend->calls() : 0) - calls_at_start;
  return st;
}

void ExportTimeseries(const std::string& run_dir) {
  const fs::path dir(run_dir);
  const int done = ReadJson(dir / "checkpoint.json").at("completed_iterations");
  std::string nash = "iteration,bank_size,solver_nashconv,nashconv_after_append\n";
  std::string oracle =
      "iteration,policy_id,score,candidates,refinement_calls,backend_calls\n";
  std::string pop = "iteration,pop_return,pop_expl,agg_score\n";
  auto num = [](const Json& v) {
    return v.is_null() ? std::string() : FormatDouble(v.get<double>());
  };
  for (int k = 1; k <= done; ++k) {
    const fs::path it = dir / Iter(k);
    const std::string ks = std::to_string(k);
    const Json sigma = ReadJson(it / "sigma.json");
    const auto probs = sigma.at("probs").get<std::vector<double>>();
    // How much the policy added at k exploits sigma_k: nashconv of sigma_k
    // (padded with zeros) in the next meta-game.
    std::string after;
    const fs::path next = k < done ? dir / Iter(k + 1) / "payoff.json"
                                   : dir / "final" / "payoff.json";
    if (fs::exists(next)) {
      const Eigen::MatrixXd u = ReadValues(ReadJson(next));
      Eigen::VectorXd s = Eigen::VectorXd::Zero(u.rows());
      for (size_t i = 0; i < probs.size(); ++i) s[i] = probs[i];
      after = FormatDouble(MetaNashConv(s, u));
    }
    nash += ks + "," + std::to_string(probs.size()) + "," +
            num(sigma.at("meta_nashconv")) + "," + after + "\n";
    const Json sc = ReadJson(it / "scores.json");
    oracle += ks + "," + sc.at("policy_id").get<std::string>() + "," +
              num(sc.at("score")) + "," + std::to_string(sc.at("candidates").size()) +
              "," + std::to_string(sc.at("refinement_calls").get<int>()) + "," +
              std::to_string(sc.at("backend_calls").get<long>()) + "\n";
    if (fs::exists(it / "eval.json")) {
      const EvalReport rep = EvalReport::FromJson(ReadJson(it / "eval.json"));
      pop += ks + "," + FormatDouble(rep.pop_return) + "," + FormatDouble(rep.pop_expl) +
             "," + FormatDouble(rep.agg_score) + "\n";
    } else {
      pop += ks + ",,,\n";
    }
  }
  WriteFile((dir / "timeseries" / "nashconv.csv").string(), nash);
  WriteFile((dir / "timeseries" / "oracle.csv").string(), oracle);
  WriteFile((dir / "timeseries" / "population.csv").string(), pop);
}

std::vector<PolicyHandle> LoadRunBank(const std::string& run_dir,
                                      const HostConfig& host) {
  const fs::path dir(run_dir);
  const auto game = ParseGameId(ReadJson(dir / "config.json").at("game").get<std::string>());
  if (!game) throw std::invalid_argument("unknown game in " + run_dir);
  const int done = ReadJson(dir / "checkpoint.json").at("completed_iterations");
  std::vector<PolicyHandle> bank;
  for (int k = 0; k <= done; ++k) bank.push_back(LoadPolicy(dir / Iter(k), *game, host));
  return bank;
}

}  // namespace csro
