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

// Command-line front end: run, eval, payoff, solve-leduc, arena, replay.

#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "csro/cfr.h"
#include "csro/eval_metrics.h"
#include "csro/match.h"
#include "csro/meta_game.h"
#include "csro/orchestrator.h"
#include "csro/populations.h"

namespace csro {
namespace {

namespace fs = std::filesystem;

GameId GameOrDie(const std::string& name) {
  const auto g = ParseGameId(name);
  if (!g) throw std::invalid_argument("unknown game: " + name);
  return *g;
}

RepeatedGameSpec MakeSpec(GameId game, int rounds, const std::string& stake) {
  RepeatedGameSpec spec = RepeatedGameSpec::Default(game);
  if (rounds > 0) spec.num_rounds = rounds;
  const auto mode = leduc::ParseStakeMode(stake);
  if (!mode) throw std::invalid_argument("unknown stake mode: " + stake);
  spec.stake_mode = *mode;
  return spec;
}

HostConfig MakeHost(const std::string& command) {
  HostConfig host = HostConfig::FromEnvironment();
  if (!command.empty()) host.command = HostConfig::SplitCommand(command);
  return host;
}

// A bot name, "cfr_plus[:iterations]", a shipped program name, or a path to
// a program file.
PolicyHandle ResolvePolicy(const std::string& spec, const RepeatedGameSpec& game,
                           const HostConfig& host) {
  if (spec.rfind("cfr_plus", 0) == 0) {
    if (game.game_id != GameId::kRepeatedLeduc) {
      throw std::invalid_argument("cfr_plus is a Leduc policy");
    }
    int iters = 10000;
    if (const auto c = spec.find(':'); c != std::string::npos) {
      iters = std::stoi(spec.substr(c + 1));
    }
    return cfr::AsPolicy(cfr::CfrPlusSolve(iters, game.stake_mode));
  }
  if (FindBot(game.game_id, spec)) return NamedPolicy(spec, game.game_id);
  if (auto src = ShippedPolicySource(spec)) {
    return SpawnCodePolicy(spec, *src, game.game_id, host);
  }
  if (fs::is_regular_file(spec)) {
    return SpawnCodePolicy(fs::path(spec).stem().string(), ReadFile(spec), game.game_id,
                           host);
  }
  throw std::invalid_argument("cannot resolve policy: " + spec);
}

std::vector<PolicyHandle> ResolveAll(const std::vector<std::string>& names,
                                     const RepeatedGameSpec& spec, const HostConfig& host) {
  std::vector<PolicyHandle> out;
  for (const auto& n : names) {
    if (n == "rrps_population" || n == "leduc_heuristics") {
      for (auto& p : ResolvePopulation({n}, spec.game_id)) out.push_back(std::move(p));
    } else {
      out.push_back(ResolvePolicy(n, spec, host));
    }
  }
  return out;
}

void Emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    WriteFile(path, text);
  }
}

// Common game flags.
struct GameFlags {
  std::string game = "rrps";
  int rounds = 0;
  std::string stake = "ante";
  std::string host;
  uint64_t seed = 0;
  int threads = 0;

  void Add(CLI::App* app) {
    app->add_option("--game", game, "rrps or leduc")->capture_default_str();
    app->add_option("--rounds", rounds, "stage games per match (0: game default)");
    app->add_option("--stake-mode", stake, "Leduc stakes: ante or blinds")
        ->capture_default_str();
    app->add_option("--host", host, "policy host command (default $CSRO_POLICY_HOST)");
    app->add_option("--seed", seed)->capture_default_str();
    app->add_option("--threads", threads, "worker threads (0: all cores)");
  }
  RepeatedGameSpec Spec() const { return MakeSpec(GameOrDie(game), rounds, stake); }
};

int Run(const std::string& config_path, const std::string& output,
        const std::vector<std::string>& overrides) {
  Json doc = Json::object();
  if (!config_path.empty()) doc = Json::parse(ReadFile(config_path));
  ApplyOverrides(doc, overrides);
  if (!output.empty()) doc["output_dir"] = output;
  const RunConfig config = RunConfig::FromJson(doc);
  RunHooks hooks;
  hooks.log = [](const std::string& m) { std::cerr << m << "\n"; };
  try {
    const RunState st = RunCsro(config, hooks);
    std::cout << "completed " << st.iteration << " iterations, bank size "
              << st.bank.size() << ", backend calls " << st.backend_calls << "\n";
    std::cout << "final sigma:";
    for (int i = 0; i < st.final_sigma.probs.size(); ++i) {
      if (st.final_sigma.probs[i] > 0) {
        std::cout << " " << st.final_sigma.bank_ids[i] << "="
                  << FormatDouble(st.final_sigma.probs[i]);
      }
    }
    std::cout << "\n";
  } catch (const RunError& e) {
    std::cerr << "oracle failed at iteration " << e.iteration() << ": " << e.what()
              << "\nrerun the same command to resume\n";
    return 2;
  }
  return 0;
}

int Eval(const GameFlags& g, const std::vector<std::string>& policies,
         std::vector<double> weights, const std::string& run_dir,
         const std::vector<std::string>& population, int episodes,
         const std::string& json_path, const std::string& csv_path) {
  RepeatedGameSpec spec = g.Spec();
  const HostConfig host = MakeHost(g.host);
  std::vector<PolicyHandle> members;
  std::string id;
  if (!run_dir.empty()) {
    // The re-solved equilibrium of a finished run.
    const Json cfg = Json::parse(ReadFile(run_dir + "/config.json"));
    spec = MakeSpec(GameOrDie(cfg.at("game")), cfg.at("rounds"),
                    cfg.value("stake_mode", std::string("ante")));
    const auto bank = LoadRunBank(run_dir, host);
    const Json sigma = Json::parse(ReadFile(run_dir + "/final/sigma.json"));
    const auto ids = sigma.at("bank_ids").get<std::vector<std::string>>();
    const auto probs = sigma.at("probs").get<std::vector<double>>();
    weights.clear();
    for (size_t i = 0; i < ids.size(); ++i) {
      if (probs[i] <= 0) continue;
      for (const auto& p : bank) {
        if (p.id() == ids[i]) members.push_back(p);
      }
      weights.push_back(probs[i]);
    }
    id = "sigma_final";
  } else if (!policies.empty()) {
    members = ResolveAll(policies, spec, host);
    id = policies.size() == 1 ? members[0].id() : "mixture";
  }
  if (members.empty()) throw std::invalid_argument("eval needs --policy or --run");
  if (weights.empty()) weights.assign(members.size(), 1.0);
  const PolicyHandle agent =
      members.size() == 1 ? members[0] : MixturePolicy(id, members, weights);
  std::vector<std::string> names = population;
  if (names.empty()) {
    names = {spec.game_id == GameId::kRrps ? "rrps_population" : "leduc_heuristics"};
  }
  const EvalReport r = EvaluateAgainstPopulation(
      agent, ResolveAll(names, spec, host), spec, episodes, g.seed, g.threads);
  if (!json_path.empty()) Emit(json_path, r.ToJson().dump(2) + "\n");
  Emit(csv_path, r.ToCsv());
  return 0;
}

int Payoff(const GameFlags& g, const std::vector<std::string>& bank_names, int episodes,
           const std::string& json_path, const std::string& csv_path, bool solve) {
  const RepeatedGameSpec spec = g.Spec();
  const auto bank = ResolveAll(bank_names, spec, MakeHost(g.host));
  PayoffOptions opts;
  opts.episodes_per_pair = episodes > 0 ? episodes : DefaultEpisodesPerPair(spec.game_id);
  opts.seed = g.seed;
  opts.threads = g.threads;
  const PayoffMatrix u = ComputePayoffMatrix(bank, spec, opts);
  if (!json_path.empty()) Emit(json_path, u.ToJson().dump(2) + "\n");
  Emit(csv_path, u.ToCsv());
  if (solve) {
    const MetaStrategy s = ComputeMetaEquilibrium(u);
    std::cerr << s.ToJson().dump() << "\n";
  }
  return 0;
}

int SolveLeduc(int iterations, const std::string& stake, std::vector<int> checkpoints,
               const std::string& profile_path, const std::string& csv_path) {
  const auto mode = leduc::ParseStakeMode(stake);
  if (!mode) throw std::invalid_argument("unknown stake mode: " + stake);
  if (checkpoints.empty()) {
    for (int c = 1; c < iterations; c *= 10) checkpoints.push_back(c);
  }
  checkpoints.push_back(iterations);
  std::sort(checkpoints.begin(), checkpoints.end());
  checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());
  std::erase_if(checkpoints, [&](int c) { return c < 0 || c > iterations; });

  cfr::LeducTree tree(*mode);
  std::string csv = "iteration,exploitability\n";
  cfr::SolveOptions opts;
  opts.iterations = iterations;
  opts.stake_mode = *mode;
  opts.checkpoints = checkpoints;
  opts.on_checkpoint = [&](int t, const cfr::StrategyProfile& p) {
    csv += std::to_string(t) + "," + FormatDouble(tree.Exploitability(p)) + "\n";
  };
  const cfr::StrategyProfile profile = cfr::CfrPlusSolve(opts);
  Emit(profile_path, profile.ToJson().dump(2) + "\n");
  Emit(csv_path, csv);
  return 0;
}

// Mean and stderr of every ordered pair, plus an "ALL" row per bot.
int Arena(const GameFlags& g, std::vector<std::string> names, int episodes,
          const std::string& log_dir) {
  RepeatedGameSpec spec = g.Spec();
  if (spec.game_id != GameId::kRrps) throw std::invalid_argument("arena is RRPS only");
  if (names.empty()) names = {"rrps_population"};
  const auto bots = ResolveAll(names, spec, MakeHost(g.host));
  const int n = static_cast<int>(bots.size());
  // One job per (i, j, e) with i < j; seeds as in the payoff matrix.
  std::vector<std::array<int, 3>> jobs;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      for (int e = 0; e < episodes; ++e) jobs.push_back({i, j, e});
    }
  }
  std::vector<double> ret(jobs.size());
  ParallelFor(static_cast<int>(jobs.size()), g.threads, [&](int k) {
    const auto [i, j, e] = jobs[k];
    const uint64_t seed = DeriveSeed(g.seed, {static_cast<uint64_t>(i),
                                              static_cast<uint64_t>(j),
                                              static_cast<uint64_t>(e)});
    const bool swap = e % 2 == 1;
    const MatchResult r = PlayMatch(spec, swap ? bots[j] : bots[i], swap ? bots[i] : bots[j],
                                    seed, {ViolationMode::kSubstitute, 3});
    ret[k] = swap ? r.returns[1] : r.returns[0];
    if (!log_dir.empty()) {
      WriteFile(log_dir + "/" + bots[i].id() + "__" + bots[j].id() + "__" +
                    std::to_string(e) + ".json",
                r.transcript.dump() + "\n");
    }
  });
  std::map<std::pair<int, int>, std::vector<double>> samples;
  for (size_t k = 0; k < jobs.size(); ++k) {
    samples[{jobs[k][0], jobs[k][1]}].push_back(ret[k]);
    samples[{jobs[k][1], jobs[k][0]}].push_back(-ret[k]);
  }
  std::ostringstream out;
  out << "bot_name,opponent,mean_return,stderr\n";
  for (int i = 0; i < n; ++i) {
    double total = 0, var = 0;
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const auto [m, se] = MeanAndStdErr(samples[{i, j}]);
      out << bots[i].id() << "," << bots[j].id() << "," << FormatDouble(m) << ","
          << FormatDouble(se) << "\n";
      total += m;
      var += se * se;
    }
    if (n > 1) {
      out << bots[i].id() << ",ALL," << FormatDouble(total / (n - 1)) << ","
          << FormatDouble(std::sqrt(var) / (n - 1)) << "\n";
    }
  }
  std::cout << out.str();
  return 0;
}

// Replays a transcript from its seed and compares it byte for byte.
int Replay(const std::string& path, const std::vector<std::string>& bindings,
           const std::string& host_command) {
  const Json t = Json::parse(ReadFile(path));
  const RepeatedGameSpec spec =
      MakeSpec(GameOrDie(t.at("game")), t.at("num_rounds"),
               t.value("stake_mode", std::string("ante")));
  std::map<std::string, std::string> bound;
  for (const auto& b : bindings) {
    const auto eq = b.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("--policy wants id=spec: " + b);
    bound[b.substr(0, eq)] = b.substr(eq + 1);
  }
  const HostConfig host = MakeHost(host_command);
  std::vector<PolicyHandle> sides;
  for (const std::string id : t.at("policies")) {
    const std::string what = bound.count(id) ? bound[id] : id;
    sides.push_back(ResolvePolicy(what, spec, host).WithId(id));
  }
  const MatchResult r =
      PlayMatch(spec, sides[0], sides[1], t.at("seed"), {ViolationMode::kSubstitute, 3});
  const bool same = Json::parse(r.transcript.dump()) == t;
  std::cout << "returns " << FormatDouble(r.returns[0]) << " " << FormatDouble(r.returns[1])
            << "\n"
            << (same ? "transcript reproduced" : "transcript differs") << "\n";
  return same ? 0 : 1;
}

int Main(int argc, char** argv) {
  CLI::App app{"Code-space response oracles"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run or resume CSRO from a config file");
  run->allow_extras();
  std::string config_path, output;
  run->add_option("--config", config_path, "JSON config; keys may be overridden "
                                            "with --key=value or --a.b=value");
  run->add_option("--output", output, "run directory (overrides output_dir)");

  auto* eval = app.add_subcommand("eval", "population metrics of a policy or mixture");
  GameFlags eg;
  eg.Add(eval);
  std::vector<std::string> eval_policies, eval_pop;
  std::vector<double> weights;
  std::string run_dir, eval_json, eval_csv;
  int eval_episodes = kDefaultEvalEpisodes;
  eval->add_option("--policy", eval_policies, "bot, shipped program, file or cfr_plus[:n]");
  eval->add_option("--weights", weights, "mixture weights, one per --policy");
  eval->add_option("--run", run_dir, "evaluate the final sigma of a run directory");
  eval->add_option("--population", eval_pop, "opponents (names or groups)");
  eval->add_option("--episodes", eval_episodes)->capture_default_str();
  eval->add_option("--json", eval_json, "write the report as JSON");
  eval->add_option("--csv", eval_csv, "write the CSV here instead of stdout");

  auto* payoff = app.add_subcommand("payoff", "cross-table for a named bank");
  GameFlags pg;
  pg.Add(payoff);
  std::vector<std::string> bank;
  int pay_episodes = 0;
  std::string pay_json, pay_csv;
  bool solve = false;
  payoff->add_option("--bank", bank, "policies")->required();
  payoff->add_option("--episodes", pay_episodes, "per pair (0: game default)");
  payoff->add_option("--json", pay_json);
  payoff->add_option("--csv", pay_csv);
  payoff->add_flag("--solve", solve, "also print the meta-equilibrium to stderr");

  auto* solve_leduc = app.add_subcommand("solve-leduc", "CFR+ on single-hand Leduc");
  int cfr_iters = 10000;
  std::string cfr_stake = "ante", profile_path = "leduc_cfr_profile.json", curve_path;
  std::vector<int> checkpoints;
  solve_leduc->add_option("--iterations", cfr_iters)->capture_default_str();
  solve_leduc->add_option("--stake-mode", cfr_stake)->capture_default_str();
  solve_leduc->add_option("--checkpoints", checkpoints,
                          "iterations at which exploitability is measured "
                          "(default powers of ten)");
  solve_leduc->add_option("--profile", profile_path, "profile JSON output")->capture_default_str();
  solve_leduc->add_option("--curve", curve_path, "exploitability CSV output (default stdout)");

  auto* arena = app.add_subcommand("arena", "RRPS cross-table");
  GameFlags ag;
  ag.Add(arena);
  std::vector<std::string> arena_bots;
  int arena_episodes = 20;
  std::string log_dir;
  arena->add_option("--bots", arena_bots, "default: rrps_population");
  arena->add_option("--episodes", arena_episodes)->capture_default_str();
  arena->add_option("--log-dir", log_dir, "write every match transcript here");

  auto* replay = app.add_subcommand("replay", "re-execute a logged match");
  std::string transcript, replay_host;
  std::vector<std::string> bindings;
  replay->add_option("transcript", transcript)->required();
  replay->add_option("--policy", bindings, "id=spec for ids that are not bot names");
  replay->add_option("--host", replay_host);

  CLI11_PARSE(app, argc, argv);

  if (*run) return Run(config_path, output, run->remaining());
  if (*eval) {
    return Eval(eg, eval_policies, weights, run_dir, eval_pop, eval_episodes, eval_json,
                eval_csv);
  }
  if (*payoff) return Payoff(pg, bank, pay_episodes, pay_json, pay_csv, solve);
  if (*solve_leduc) {
    return SolveLeduc(cfr_iters, cfr_stake, checkpoints, profile_path,
                      curve_path.empty() ? "-" : curve_path);
  }
  if (*arena) return Arena(ag, arena_bots, arena_episodes, log_dir);
  if (*replay) return Replay(transcript, bindings, replay_host);
  return 1;
}

}  // namespace
}  // namespace csro

int main(int argc, char** argv) {
  try {
    return csro::Main(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
