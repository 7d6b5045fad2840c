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

#include <filesystem>
#include <thread>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "csro/populations.h"
#include "gtest/gtest.h"
#include "httplib.h"

namespace csro {
namespace {

namespace fs = std::filesystem;

const std::string kFixtures = CSRO_SOURCE_DIR "/tests/fixtures";

PolicyHandle Rrps(const std::string& name) {
  return FindBot(GameId::kRrps, name)->factory();
}

MetaStrategy Sigma(const std::vector<PolicyHandle>& bank,
                   std::vector<double> probs) {
  MetaStrategy s;
  for (const auto& h : bank) s.bank_ids.push_back(h.id());
  s.probs = Eigen::Map<Eigen::VectorXd>(probs.data(), probs.size());
  return s;
}

// Candidate programs for controller tests: natively bound, tagged so the
// scripted evaluator can tell them apart.
std::string Program(int version) {
  return "# native-policy: rockbot\n# version " + std::to_string(version) + "\n";
}
std::string Fence(const std::string& program) {
  return "Here you go.\n\n```python\n" + program + "```\n";
}
int VersionOf(const std::string& source) {
  const size_t at = source.find("# version ");
  return at == std::string::npos ? -1 : std::stoi(source.substr(at + 10));
}

Evaluation Scored(double score) {
  Evaluation e;
  e.score = score;
  e.per_opponent = {{"rockbot", 1.0, score, 0.1}};
  return e;
}

// Scores by version number; NaN marks a rejected candidate.
std::function<Evaluation(const PolicyHandle&)> ScoreTable(std::vector<double> s) {
  return [s](const PolicyHandle& h) {
    const double v = s.at(VersionOf(h.source()));
    if (std::isnan(v)) {
      Evaluation e;
      e.rejected = true;
      e.rejection_reason = "scripted";
      return e;
    }
    return Scored(v);
  };
}

struct Fixture {
  std::vector<PolicyHandle> bank = {Rrps("rockbot"), Rrps("scissorsbot")};
  OracleContext ctx;
  Fixture() {
    ctx.spec = RepeatedGameSpec::Rrps();
    ctx.bank = &bank;
    ctx.sigma = Sigma(bank, {1, 0});
    ctx.id_prefix = "t";
    ctx.threads = 1;
  }
};

// --- Opponent filters --------------------------------------------------------

std::vector<int> Indices(const std::vector<std::pair<int, double>>& v) {
  std::vector<int> out;
  for (const auto& [i, p] : v) out.push_back(i);
  return out;
}

TEST(FilterTest, Examples) {
  Eigen::VectorXd s(4);
  s << 0.5, 0.3, 0.15, 0.05;
  EXPECT_EQ(Indices(FilterOpponents(s, OpponentFilter::TopK(2))),
            (std::vector<int>{0, 1}));
  Eigen::VectorXd t(3);
  t << 0.5, 0.4, 0.1;
  EXPECT_EQ(Indices(FilterOpponents(t, OpponentFilter::MinSupport(0.1))),
            (std::vector<int>{0, 1, 2}));
  Eigen::VectorXd pure(3);
  pure << 0, 1, 0;
  const auto one = FilterOpponents(pure, OpponentFilter::TopK(5));
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].first, 1);
  EXPECT_EQ(one[0].second, 1.0);
}

TEST(FilterTest, OrderingTiesAndFallback) {
  Eigen::VectorXd s(5);
  s << 0.1, 0.3, 0.1, 0.3, 0.2;
  EXPECT_EQ(Indices(FilterOpponents(s, OpponentFilter::TopK(3))),
            (std::vector<int>{1, 3, 4}));
  EXPECT_EQ(Indices(FilterOpponents(s, OpponentFilter::TopK(4))),
            (std::vector<int>{1, 3, 4, 0}));
  EXPECT_EQ(Indices(FilterOpponents(s, OpponentFilter::MinSupport(0.2))),
            (std::vector<int>{1, 3, 4}));
  // Nothing reaches tau: the most likely member alone.
  EXPECT_EQ(Indices(FilterOpponents(s, OpponentFilter::MinSupport(0.9))),
            (std::vector<int>{1}));
  Eigen::VectorXd z(3);
  z << 0.5, 0, 0.5;
  EXPECT_EQ(Indices(FilterOpponents(z, OpponentFilter::None())),
            (std::vector<int>{0, 2}));
  EXPECT_THROW(FilterOpponents(s, OpponentFilter::TopK(0)), std::invalid_argument);
  EXPECT_THROW(FilterOpponents(s, OpponentFilter::MinSupport(0)),
               std::invalid_argument);
  EXPECT_THROW(FilterOpponents(s, OpponentFilter::MinSupport(1.5)),
               std::invalid_argument);
}

TEST(FilterTest, RandomSigmaProperties) {
  Rng rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + rng.UniformInt(10);
    Eigen::VectorXd s(n);
    for (int i = 0; i < n; ++i) s[i] = rng.Bernoulli(0.3) ? 0 : rng.UniformReal();
    if (s.sum() == 0) s[0] = 1;
    s /= s.sum();
    const int k = 1 + rng.UniformInt(6);
    const auto top = FilterOpponents(s, OpponentFilter::TopK(k));
    EXPECT_FALSE(top.empty());
    EXPECT_LE(static_cast<int>(top.size()), k);
    for (size_t i = 1; i < top.size(); ++i) EXPECT_GE(top[i - 1].second, top[i].second);
    for (const auto& [i, p] : top) EXPECT_EQ(p, s[i]);
    const double tau = 0.01 + rng.UniformReal() * 0.5;
    for (const auto& [i, p] : FilterOpponents(s, OpponentFilter::MinSupport(tau))) {
      EXPECT_TRUE(p >= tau || p == s.maxCoeff());
    }
  }
}

// --- Templates and prompts -----------------------------------------------------

TEST(TemplateTest, FormatCollectsMissingKeys) {
  EXPECT_EQ(FormatTemplate("a {x} {{y}} {x}", {{"x", "1"}}), "a 1 {y} 1");
  try {
    FormatTemplate("{a}{b}{a}{c}", {{"b", ""}});
    FAIL();
  } catch (const TemplateError& e) {
    EXPECT_EQ(e.missing(), (std::vector<std::string>{"a", "c"}));
  }
  EXPECT_THROW(FormatTemplate("{open", {}), TemplateError);
  EXPECT_THROW(FormatTemplate("close}", {}), TemplateError);
}

TEST(TemplateTest, ShippedTemplates) {
  EXPECT_NE(RrpsPromptTemplate().find("Repeated Rock Paper Scissors"),
            std::string::npos);
  const std::string& leduc = LeducPromptTemplate();
  EXPECT_NE(leduc.find("# Opponents"), std::string::npos);
  EXPECT_NE(leduc.find("*SEARCH/REPLACE* blocks will replace *all* matching "
                       "occurrences."),
            std::string::npos);
}

PromptRequest LeducRequest(InputMode mode) {
  PromptRequest r;
  r.game = GameId::kRepeatedLeduc;
  r.mode = mode;
  r.base_program = "def act(obs):\n  return 'CALL'\n";
  r.opponents = {{"opp_a", 0.75, "class A:\n  pass  # {not a placeholder}\n"},
                 {"opp_b", 0.25, "class B:\n  x = {'k': 1}\n"}};
  r.edit = EditMode::kPatch;
  return r;
}

TEST(PromptTest, RrpsNoOpponents) {
  PromptRequest r;
  r.game = GameId::kRrps;
  r.mode = InputMode::kNone;
  r.opponents = {{"rockbot", 1, "always ROCK"}};
  const std::string p = ConstructPrompt(r);
  EXPECT_NE(p.find("Repeated Rock Paper Scissors"), std::string::npos);
  EXPECT_EQ(p.find("Opponents"), std::string::npos);
  EXPECT_EQ(p.find("always ROCK"), std::string::npos);
  EXPECT_EQ(p.rfind(RrpsPromptTemplate(), 0), 0u);
}

TEST(PromptTest, LeducCodeModeEmbedsSourcesVerbatim) {
  const auto r = LeducRequest(InputMode::kCode);
  const std::string p = ConstructPrompt(r);
  EXPECT_NE(p.find("# Opponents"), std::string::npos);
  EXPECT_NE(p.find("Here are the summary of opponent codes"), std::string::npos);
  for (const auto& o : r.opponents) EXPECT_NE(p.find(o.payload), std::string::npos);
  EXPECT_NE(p.find(r.base_program), std::string::npos);
  EXPECT_NE(p.find("# Current program"), std::string::npos);
  EXPECT_NE(p.find(">>>>>>> REPLACE"), std::string::npos);
  EXPECT_EQ(p.find("{code}"), std::string::npos);
  EXPECT_EQ(ConstructPrompt(r), p);
}

TEST(PromptTest, LeducNoneModeDropsOpponentSection) {
  const std::string p = ConstructPrompt(LeducRequest(InputMode::kNone));
  EXPECT_EQ(p.find("# Opponents"), std::string::npos);
  EXPECT_EQ(p.find("class A"), std::string::npos);
  EXPECT_NE(p.find("# Current program"), std::string::npos);
}

TEST(PromptTest, FeedbackTable) {
  PromptRequest r;
  r.game = GameId::kRrps;
  r.mode = InputMode::kDescription;
  r.opponents = {{"rockbot", 0.6, "Always plays rock."},
                 {"paperbot", 0.4, "Always plays paper."}};
  r.current = ProgramFeedback{"class Agent:\n  pass\n",
                              {{"rockbot", 0.6, 12.5, 0.25},
                               {"paperbot", 0.4, -3, 1.5}},
                              6.3};
  const std::string p = ConstructPrompt(r);
  EXPECT_NE(p.find("Always plays paper."), std::string::npos);
  EXPECT_NE(p.find("# Current program"), std::string::npos);
  EXPECT_NE(p.find("class Agent:\n  pass\n"), std::string::npos);
  EXPECT_NE(p.find("| rockbot | 0.6 | 12.5 | 0.25 |"), std::string::npos);
  EXPECT_NE(p.find("| paperbot | 0.4 | -3 | 1.5 |"), std::string::npos);
  EXPECT_NE(p.find("Weighted score: 6.3"), std::string::npos);
  r.edit = EditMode::kPatch;
  EXPECT_NE(ConstructPrompt(r).find("<<<<<<< SEARCH"), std::string::npos);
  EXPECT_NE(ConstructPrompt(r), p);
}

TEST(PromptTest, LeducNeedsAProgram) {
  auto r = LeducRequest(InputMode::kCode);
  r.base_program.clear();
  EXPECT_THROW(ConstructPrompt(r), std::invalid_argument);
}

// --- Completions ---------------------------------------------------------------

TEST(ExtractTest, Cases) {
  EXPECT_EQ(ExtractProgram("Sure.\n```python\nx = 1\n```\nDone."), "x = 1\n");
  EXPECT_EQ(ExtractProgram("```\na\n```\ntext\n```py\nlonger = 2\n```\n"),
            "longer = 2\n");
  EXPECT_THROW(ExtractProgram("I would simply play rock every time."),
               MalformedGenerationError);
  EXPECT_THROW(ExtractProgram("```python\n\n```"), MalformedGenerationError);
  EXPECT_THROW(ExtractProgram(""), MalformedGenerationError);
  // No fences: from the first code-looking line, trailing prose dropped.
  EXPECT_EQ(ExtractProgram("Program below.\nimport random\n\nclass Agent:\n"
                           "  def act(self):\n    return 1\nHope this helps!\n"),
            "import random\n\nclass Agent:\n  def act(self):\n    return 1\n");
}

TEST(PatchTest, ThreeCases) {
  const std::string prog = "a = 1\nb = 2\na = 1\nc = 3\na = 1\n";
  EXPECT_EQ(ApplyPatchSet(prog, {{"b = 2", "b = 20"}}),
            "a = 1\nb = 20\na = 1\nc = 3\na = 1\n");
  EXPECT_EQ(ApplyPatchSet(prog, {{"a = 1", "a = 9"}}),
            "a = 9\nb = 2\na = 9\nc = 3\na = 9\n");
  const std::string before = prog;
  try {
    ApplyPatchSet(prog, {{"b = 2", "b = 5"}, {"zzz", "y"}});
    FAIL();
  } catch (const PatchError& e) {
    EXPECT_EQ(e.block(), 1);
  }
  EXPECT_EQ(prog, before);
}

TEST(PatchTest, SequentialBlocksSeeEarlierOutput) {
  EXPECT_EQ(ApplyPatchSet("x\n", {{"x", "y"}, {"y", "z"}}), "z\n");
  EXPECT_EQ(ApplyPatchSet("aaa", {{"aa", "b"}}), "ba");
}

TEST(PatchTest, ParseBlocks) {
  const std::string text =
      "Change one.\n"
      "<<<<<<< SEARCH\n    return 'CALL'\n=======\n    return 'RAISE'\n"
      ">>>>>>> REPLACE\n"
      "And two.\n"
      "```python\n<<<<<<< SEARCH\nx = 1\ny = 2\n=======\n>>>>>>> REPLACE\n```\n";
  const PatchSet p = ParsePatchSet(text);
  ASSERT_EQ(p.size(), 2u);
  EXPECT_EQ(p[0].search, "    return 'CALL'");
  EXPECT_EQ(p[0].replace, "    return 'RAISE'");
  EXPECT_EQ(p[1].search, "x = 1\ny = 2");
  EXPECT_EQ(p[1].replace, "");
  EXPECT_TRUE(ParsePatchSet("no blocks").empty());
  EXPECT_THROW(ParsePatchSet("<<<<<<< SEARCH\n=======\nx\n>>>>>>> REPLACE\n"),
               MalformedGenerationError);
  EXPECT_THROW(ParsePatchSet("<<<<<<< SEARCH\nx\n=======\ny\n"),
               MalformedGenerationError);
  EXPECT_EQ(ProgramFromCompletion(text, "x = 1\ny = 2\n    return 'CALL'\n"),
            "\n    return 'RAISE'\n");
  EXPECT_THROW(ProgramFromCompletion(text, "unrelated\n"), PatchError);
  EXPECT_EQ(ProgramFromCompletion("```\nnew = 1\n```", "old"), "new = 1\n");
}

// --- Summaries -----------------------------------------------------------------

TEST(SummarizerTest, MockFixtureAndCache) {
  MockBackend mock(kFixtures + "/summaries");
  PolicySummarizer s(&mock);
  const std::string src = Rrps("rockbot").source();
  const std::string text = s.Summarize(src, GameId::kRrps);
  EXPECT_NE(text.find("constant"), std::string::npos);
  EXPECT_NE(text.find("ROCK"), std::string::npos);
  EXPECT_EQ(mock.calls(), 1);
  EXPECT_EQ(s.Summarize(src, GameId::kRrps), text);
  EXPECT_EQ(mock.calls(), 1);
  EXPECT_EQ(s.cache_hits(), 1);
  EXPECT_THROW(s.Summarize("", GameId::kRrps), std::invalid_argument);
  EXPECT_THROW(s.Summarize(" \n", GameId::kRrps), std::invalid_argument);
  // No fixture for this one.
  EXPECT_THROW(s.Summarize("something else", GameId::kRrps), OracleError);
}

TEST(SummarizerTest, FailuresAreNotCached) {
  ScriptedBackend b([](const std::string&, int call) -> std::string {
    if (call < 2) throw BackendError("down");
    if (call == 2) return "   ";
    return "Plays paper.";
  });
  PolicySummarizer s(&b, "", 1);
  EXPECT_THROW(s.Summarize("p", GameId::kRrps), OracleError);
  // Attempt 3 is blank, attempt 4 succeeds.
  EXPECT_EQ(s.Summarize("p", GameId::kRrps), "Plays paper.");
  EXPECT_EQ(s.Summarize("p", GameId::kRrps), "Plays paper.");
  // Four requests, of which the last two completed.
  EXPECT_EQ(b.prompts().size(), 4u);
  EXPECT_EQ(b.calls(), 2);
}

TEST(SummarizerTest, PersistentCache) {
  const fs::path dir = fs::temp_directory_path() / "csro_summary_cache_test";
  fs::remove_all(dir);
  {
    auto b = ScriptedBackend::FromList({"Cycles through moves."});
    PolicySummarizer s(b.get(), dir.string());
    EXPECT_EQ(s.Summarize("src", GameId::kRrps), "Cycles through moves.");
  }
  auto b = ScriptedBackend::FromList({});
  PolicySummarizer s(b.get(), dir.string());
  // Same backend id ("scripted"), so the disk entry applies.
  EXPECT_EQ(s.Summarize("src", GameId::kRrps), "Cycles through moves.");
  EXPECT_EQ(b->calls(), 0);
  fs::remove_all(dir);
}

// --- Zero-shot -------------------------------------------------------------------

TEST(ZeroShotTest, LeducListingFromMock) {
  std::vector<PolicyHandle> bank;
  for (const auto& d : LeducHeuristics()) bank.push_back(d.factory());
  MockBackend mock(kFixtures + "/leduc_zero_shot");
  OracleContext ctx;
  ctx.spec = RepeatedGameSpec::Leduc();
  ctx.bank = &bank;
  ctx.sigma = Sigma(bank, {0.5, 0.5});
  ctx.backend = &mock;
  ctx.base_program = ReadFile(CSRO_SOURCE_DIR "/policies/leduc_heuristic.py");
  ctx.config.variant = OracleVariant::kZeroShot;
  const OracleResult r = RunOracle(ctx);
  ASSERT_TRUE(r.policy);
  EXPECT_FALSE(r.evaluated);
  EXPECT_EQ(r.source, ctx.base_program);
  EXPECT_EQ(mock.calls(), 1);
  ASSERT_EQ(r.exchanges.size(), 1u);
  EXPECT_NE(r.exchanges[0].prompt.find("AlwaysCall"), std::string::npos);
  const auto m = PlayMatch(ctx.spec, *r.policy, bank[1], 1);
  EXPECT_GT(m.returns[0], 0);
}

TEST(ZeroShotTest, RetryContract) {
  Fixture f;
  f.ctx.config.retry_budget = 3;
  auto b = ScriptedBackend::FromList({"no code here", Fence(Program(1))});
  f.ctx.backend = b.get();
  const OracleResult r = ZeroShot(f.ctx);
  EXPECT_EQ(r.source, Program(1));
  ASSERT_EQ(r.exchanges.size(), 2u);
  EXPECT_NE(r.exchanges[0].error, "");
  EXPECT_EQ(r.exchanges[1].error, "");
  // The retry tells the backend what went wrong.
  EXPECT_NE(r.exchanges[1].prompt.find("no program"), std::string::npos);

  auto garbage = std::make_unique<ScriptedBackend>(
      [](const std::string&, int) { return std::string("garbage"); });
  f.ctx.backend = garbage.get();
  EXPECT_THROW(ZeroShot(f.ctx), OracleError);
  EXPECT_EQ(garbage->calls(), 4);
}

TEST(ZeroShotTest, LoadFailuresAreRetried) {
  Fixture f;
  f.ctx.config.retry_budget = 1;
  auto b = ScriptedBackend::FromList(
      {Fence("# native-policy: no_such_bot\n"), Fence(Program(2))});
  f.ctx.backend = b.get();
  const OracleResult r = ZeroShot(f.ctx);
  EXPECT_EQ(VersionOf(r.source), 2);
  EXPECT_NE(r.exchanges[0].error.find("load"), std::string::npos);
}

// --- Linear refinement -------------------------------------------------------------

TEST(TerminatedTest, Examples) {
  EXPECT_TRUE(Terminated(0.5, 0, 10));
  EXPECT_TRUE(Terminated(-1, 10, 10));
  EXPECT_FALSE(Terminated(-1, 3, 10));
  EXPECT_TRUE(Terminated(0, 0, 10));
  EXPECT_TRUE(Terminated(-5, 0, 0));
}

OracleResult Linear(std::vector<double> scores, int m,
                    std::unique_ptr<ScriptedBackend>* backend = nullptr) {
  Fixture f;
  std::vector<std::string> completions;
  for (size_t i = 0; i < scores.size(); ++i) completions.push_back(Fence(Program(i)));
  auto b = ScriptedBackend::FromList(completions);
  f.ctx.backend = b.get();
  f.ctx.config.refinement_budget = m;
  f.ctx.evaluator = ScoreTable(scores);
  OracleResult r = LinearRefinement(f.ctx);
  if (backend) *backend = std::move(b);
  return r;
}

TEST(LinearRefinementTest, StopsOnNonNegativeScore) {
  std::unique_ptr<ScriptedBackend> b;
  const auto r = Linear({-2, -1, 0.5, 7}, 10, &b);
  EXPECT_EQ(VersionOf(r.source), 2);
  EXPECT_EQ(r.evaluation.score, 0.5);
  EXPECT_EQ(r.refinement_calls, 2);
  EXPECT_EQ(b->calls(), 3);
  // Refinement prompts carry the incumbent and its scores.
  EXPECT_NE(b->prompts()[1].find(Program(0)), std::string::npos);
  EXPECT_NE(b->prompts()[1].find("Weighted score: -2"), std::string::npos);
  EXPECT_NE(b->prompts()[2].find(Program(1)), std::string::npos);
}

TEST(LinearRefinementTest, KeepsOnlyStrictImprovements) {
  const auto r = Linear({-2, -3, -1}, 2);
  EXPECT_EQ(VersionOf(r.source), 2);
  EXPECT_EQ(r.evaluation.score, -1);
  EXPECT_EQ(r.candidates[2].parent, 0);

  // A tie keeps the incumbent.
  std::unique_ptr<ScriptedBackend> b;
  const auto t = Linear({-2, -2, -3}, 2, &b);
  EXPECT_EQ(VersionOf(t.source), 0);
  EXPECT_NE(b->prompts()[2].find(Program(0)), std::string::npos);
}

TEST(LinearRefinementTest, NoRefinementWhenSeedWins) {
  std::unique_ptr<ScriptedBackend> b;
  const auto r = Linear({1, 5}, 10, &b);
  EXPECT_EQ(r.refinement_calls, 0);
  EXPECT_EQ(b->calls(), 1);
  EXPECT_EQ(r.evaluation.score, 1);
}

TEST(LinearRefinementTest, ZeroBudgetIsZeroShotPlusEvaluation) {
  const auto r = Linear({-4, 1}, 0);
  EXPECT_EQ(r.refinement_calls, 0);
  EXPECT_TRUE(r.evaluated);
  EXPECT_EQ(r.evaluation.score, -4);
}

TEST(LinearRefinementTest, RejectedAndFailedGenerations) {
  const double rej = std::nan("");
  // A rejected seed: the first valid candidate becomes the incumbent.
  auto r = Linear({rej, -3, -1}, 2);
  EXPECT_EQ(r.evaluation.score, -1);
  r = Linear({rej, -3, rej}, 2);
  EXPECT_EQ(r.evaluation.score, -3);
  EXPECT_THROW(Linear({rej, rej, rej}, 2), OracleError);

  // Failed generations count against M.
  Fixture f;
  f.ctx.config.refinement_budget = 2;
  f.ctx.config.retry_budget = 0;
  auto b = ScriptedBackend::FromList({Fence(Program(0)), "prose", Fence(Program(2))});
  f.ctx.backend = b.get();
  f.ctx.evaluator = ScoreTable({-2, 0, -1});
  const auto g = LinearRefinement(f.ctx);
  EXPECT_EQ(g.evaluation.score, -1);
  EXPECT_EQ(g.refinement_calls, 2);
}

TEST(LinearRefinementTest, ReturnsTheBestEvaluated) {
  Rng rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const int m = rng.UniformInt(6);
    std::vector<double> s;
    for (int i = 0; i <= m; ++i) {
      s.push_back(rng.Bernoulli(0.1) ? std::nan("") : rng.UniformInt(7) - 5.0);
    }
    bool any = false;
    for (double x : s) any |= !std::isnan(x);
    OracleResult r;
    try {
      r = Linear(s, m);
    } catch (const OracleError&) {
      // Without a valid incumbent nothing stops early, so every candidate
      // was evaluated and rejected.
      EXPECT_FALSE(any);
      continue;
    }
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& c : r.candidates) {
      if (!c.evaluation.rejected) best = std::max(best, c.evaluation.score);
    }
    EXPECT_EQ(r.evaluation.score, best);
    EXPECT_TRUE(any);
  }
}

// --- Evolution --------------------------------------------------------------------

TEST(EvolutionTest, CollapsedParametersMatchLinearWithoutEarlyStop) {
  Fixture f;
  f.ctx.config.variant = OracleVariant::kEvolutionary;
  auto& p = f.ctx.config.evolution;
  p.islands = p.population_cap = p.evaluation_budget = 1;
  p.rewrite_probability = 1;
  auto b = ScriptedBackend::FromList({Fence(Program(0)), Fence(Program(1))});
  f.ctx.backend = b.get();
  // The seed is already non-negative; evolution keeps going anyway.
  f.ctx.evaluator = ScoreTable({1, 3});
  const auto r = RunOracle(f.ctx);
  EXPECT_EQ(r.evaluation.score, 3);
  EXPECT_EQ(b->calls(), 2);
  EXPECT_EQ(r.refinement_calls, 1);
  EXPECT_NE(b->prompts()[1].find(Program(0)), std::string::npos);
  EXPECT_EQ(r.island_histories, (std::vector<std::vector<int>>{{0, 1}}));
  // Worse mutations are evicted and the incumbent survives.
  auto c = ScriptedBackend::FromList({Fence(Program(0)), Fence(Program(1))});
  f.ctx.backend = c.get();
  f.ctx.evaluator = ScoreTable({1, 0.5});
  EXPECT_EQ(RunOracle(f.ctx).evaluation.score, 1);
}

// Patches that bump the version: every mutation improves on its parent.
std::string Bump(const std::string& prompt, int) {
  const size_t at = prompt.find("# version ");
  if (at == std::string::npos || prompt.find("# Current program") == std::string::npos) {
    return Fence(Program(0));
  }
  const int v = std::stoi(prompt.substr(at + 10));
  return "<<<<<<< SEARCH\n# version " + std::to_string(v) + "\n=======\n# version " +
         std::to_string(v + 1) + "\n>>>>>>> REPLACE\n";
}

TEST(EvolutionTest, ElitistReturn) {
  Fixture f;
  f.ctx.config.evolution = {3, 2, 0.5, 2, 12, 0, {}};
  ScriptedBackend b(Bump);
  f.ctx.backend = &b;
  std::vector<double> s(100);
  for (int i = 0; i < 100; ++i) s[i] = i - 10;
  f.ctx.evaluator = ScoreTable(s);
  const auto r = EvolutionaryRefinement(f.ctx);
  EXPECT_EQ(r.candidates.size(), 15u);
  EXPECT_EQ(r.refinement_calls, 12);
  for (const auto& c : r.candidates) EXPECT_GE(r.evaluation.score, c.evaluation.score);
  EXPECT_GT(r.evaluation.score, -10);
  for (const auto& h : r.island_histories) EXPECT_FALSE(h.empty());
}

TEST(EvolutionTest, IdenticalIslandsHaveIdenticalHistories) {
  Fixture f;
  auto& p = f.ctx.config.evolution;
  p = {2, 3, 0.5, 0, 16, 0.3, {7, 7}};
  f.ctx.threads = 2;
  // Branching mutations so that parent choice matters.
  ScriptedBackend b([](const std::string& prompt, int) -> std::string {
    if (prompt.find("# Current program") == std::string::npos) {
      return Fence(Program(1));
    }
    const size_t at = prompt.find("# version ");
    const int v = std::stoi(prompt.substr(at + 10));
    const bool patch = prompt.find("<<<<<<< SEARCH") != std::string::npos;
    const int child = (v * 7 + (patch ? 5 : 3)) % 97;
    return Fence(Program(child));
  });
  f.ctx.backend = &b;
  std::vector<double> s(100);
  for (int i = 0; i < 100; ++i) s[i] = std::sin(i * 1.7) * 10;
  f.ctx.evaluator = ScoreTable(s);
  const auto r = EvolutionaryRefinement(f.ctx);
  ASSERT_EQ(r.island_histories.size(), 2u);
  auto sources = [&](int island) {
    std::vector<std::string> out;
    for (int i : r.island_histories[island]) out.push_back(r.candidates[i].source);
    return out;
  };
  EXPECT_EQ(sources(0), sources(1));
  EXPECT_GT(sources(0).size(), 3u);
  // And the whole run is reproducible.
  const auto again = EvolutionaryRefinement(f.ctx);
  ASSERT_EQ(again.candidates.size(), r.candidates.size());
  for (size_t i = 0; i < r.candidates.size(); ++i) {
    EXPECT_EQ(again.candidates[i].source, r.candidates[i].source);
    EXPECT_EQ(again.candidates[i].id, r.candidates[i].id);
  }
}

TEST(EvolutionTest, FailuresConsumeBudgetWithoutAborting) {
  Fixture f;
  f.ctx.config.evolution = {2, 4, 0.5, 1, 6, 0, {}};
  f.ctx.config.retry_budget = 1;
  ScriptedBackend b([](const std::string& prompt, int) -> std::string {
    if (prompt.find("# Current program") == std::string::npos) {
      return Fence(Program(3));
    }
    throw BackendError("overloaded");
  });
  f.ctx.backend = &b;
  f.ctx.evaluator = ScoreTable({0, 0, 0, -2});
  const auto r = EvolutionaryRefinement(f.ctx);
  EXPECT_EQ(r.evaluation.score, -2);
  EXPECT_EQ(r.candidates.size(), 2u);
  // Two seeds, then six steps of two attempts each.
  EXPECT_EQ(r.exchanges.size(), 2u + 6 * 2);
  EXPECT_EQ(r.refinement_calls, 6);
}

TEST(EvolutionTest, ParamsValidate) {
  EvolutionParams p;
  EXPECT_NO_THROW(p.Validate());
  p.islands = 0;
  EXPECT_THROW(p.Validate(), std::invalid_argument);
  p = {};
  p.island_seeds = {1};
  EXPECT_THROW(p.Validate(), std::invalid_argument);
  OracleConfig c;
  c.refinement_budget = -1;
  EXPECT_THROW(c.Validate(), std::invalid_argument);
}

TEST(OracleConfigTest, JsonRoundTrip) {
  OracleConfig c;
  c.variant = OracleVariant::kEvolutionary;
  c.input_mode = InputMode::kDescription;
  c.filter = OpponentFilter::MinSupport(0.2);
  c.refinement_budget = 7;
  c.evolution.island_seeds = {1, 2, 3, 4};
  const auto back = OracleConfig::FromJson(Json::parse(c.ToJson().dump()));
  EXPECT_EQ(back.ToJson().dump(), c.ToJson().dump());
  EXPECT_EQ(OracleConfig::FromJson(Json::object()).ToJson().dump(),
            OracleConfig().ToJson().dump());
  EXPECT_THROW(OracleConfig::FromJson(Json{{"variant", "magic"}}),
               std::invalid_argument);
}

// --- Opponent context ---------------------------------------------------------------

TEST(OracleContextTest, DescriptionModeUsesSummaries) {
  Fixture f;
  f.ctx.config.variant = OracleVariant::kZeroShot;
  f.ctx.config.input_mode = InputMode::kDescription;
  MockBackend summaries(kFixtures + "/summaries");
  PolicySummarizer s(&summaries);
  auto b = ScriptedBackend::FromList({Fence(Program(0))});
  f.ctx.backend = b.get();
  EXPECT_THROW(RunOracle(f.ctx), std::invalid_argument);
  f.ctx.summarizer = &s;
  RunOracle(f.ctx);
  EXPECT_NE(b->prompts()[0].find("always throws ROCK"), std::string::npos);
  // scissorsbot has zero probability and is never summarized.
  EXPECT_EQ(summaries.calls(), 1);
}

TEST(ExactBestResponseTest, PicksTheBestCandidate) {
  Fixture f;
  f.ctx.eval_episodes = 2;
  const auto r = ExactBestResponse(
      f.ctx, {Rrps("rockbot"), Rrps("scissorsbot"), Rrps("paperbot")});
  EXPECT_EQ(r.policy->id(), "paperbot");
  EXPECT_EQ(r.evaluation.score, 1000);
  EXPECT_EQ(r.chosen, 2);
}

// --- HTTP backend -------------------------------------------------------------------

TEST(HttpBackendTest, ParsesResponseShapes) {
  EXPECT_EQ(HttpBackend::ParseResponse(
                R"({"choices":[{"message":{"role":"assistant","content":"hi"}}]})"),
            "hi");
  EXPECT_EQ(HttpBackend::ParseResponse(
                R"({"content":[{"type":"text","text":"a"},{"type":"text","text":"b"}]})"),
            "ab");
  EXPECT_THROW(HttpBackend::ParseResponse("nope"), BackendError);
  EXPECT_THROW(HttpBackend::ParseResponse(R"({"x":1})"), BackendError);
  EXPECT_THROW(HttpBackend({"ftp://x", "m"}), std::invalid_argument);
}

TEST(HttpBackendTest, TalksToALocalServer) {
  httplib::Server server;
  std::atomic<int> hits{0};
  std::string seen_auth, seen_body;
  server.Post("/v1/chat", [&](const httplib::Request& req, httplib::Response& res) {
    if (hits++ == 0) {
      res.status = 503;
      return;
    }
    seen_auth = req.get_header_value("Authorization");
    seen_body = req.body;
    const Json body = Json::parse(req.body);
    const std::string prompt = body["messages"][0]["content"];
    res.set_content(
        Json{{"choices", {{{"message", {{"content", "echo:" + prompt}}}}}}}.dump(),
        "application/json");
  });
  server.Post("/bad", [](const httplib::Request&, httplib::Response& res) {
    res.status = 400;
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread t([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  setenv("CSRO_TEST_KEY", "sekrit", 1);
  HttpBackendConfig cfg;
  cfg.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/v1/chat";
  cfg.model = "test-model";
  cfg.api_key_env = "CSRO_TEST_KEY";
  cfg.timeout_s = 5;
  HttpBackend backend(cfg);
  EXPECT_EQ(backend.Complete("hello"), "echo:hello");
  EXPECT_EQ(hits.load(), 2);
  EXPECT_EQ(seen_auth, "Bearer sekrit");
  EXPECT_EQ(Json::parse(seen_body)["model"], "test-model");
  EXPECT_EQ(backend.calls(), 1);
  EXPECT_EQ(backend.id(), "http:test-model");

  cfg.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/bad";
  EXPECT_THROW(HttpBackend(cfg).Complete("x"), BackendError);
  cfg.api_key_env = "CSRO_TEST_KEY_UNSET";
  EXPECT_THROW(HttpBackend(cfg).Complete("x"), BackendError);

  server.stop();
  t.join();
}

}  // namespace
}  // namespace csro
