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

#include "csro/prompts.h"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace csro {
namespace {

constexpr std::string_view kSearch = "<<<<<<< SEARCH";
constexpr std::string_view kDivider = "=======";
constexpr std::string_view kReplace = ">>>>>>> REPLACE";

// The Leduc template's opponent section, dropped when no opponents are shown.
constexpr std::string_view kLeducOpponentSection =
    "# Opponents\n"
    "Here are the summary of opponent codes you are trying to beat:\n"
    "{instances}\n"
    "\n"
    "Try to reason about these opponents, and come up with a strategy that "
    "can exploit them in general.\n"
    "\n";

constexpr std::string_view kLazyPrompt =
    "You are diligent and tireless! You NEVER leave comments describing code "
    "without implementing it! You always COMPLETELY IMPLEMENT the needed code!";

std::string_view TrimRight(std::string_view s) {
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> Lines(std::string_view text) {
  std::vector<std::string_view> out;
  size_t start = 0;
  while (start <= text.size()) {
    const size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      if (start < text.size()) out.push_back(text.substr(start));
      break;
    }
    out.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return out;
}

std::string Join(const std::vector<std::string_view>& lines, size_t begin,
                 size_t end) {
  std::string out;
  for (size_t i = begin; i < end; ++i) {
    if (i > begin) out += '\n';
    out += lines[i];
  }
  return out;
}

std::string FeedbackTable(const ProgramFeedback& fb) {
  std::string out =
      "Evaluation of the current program (mean return per match against each "
      "opponent; larger is better):\n\n"
      "| opponent | probability | mean return | stderr |\n"
      "|---|---|---|---|\n";
  for (const auto& s : fb.scores) {
    out += "| " + s.id + " | " + FormatDouble(s.sigma) + " | " +
           FormatDouble(s.mean) + " | " + FormatDouble(s.std_err) + " |\n";
  }
  out += "\nWeighted score: " + FormatDouble(fb.score) + "\n";
  return out;
}

std::string Fenced(const std::string& source) {
  std::string out = "```python\n" + source;
  if (out.back() != '\n') out += '\n';
  return out + "```\n";
}

std::string RrpsPrompt(const PromptRequest& r) {
  std::string out = RrpsPromptTemplate();
  if (r.mode != InputMode::kNone && !r.opponents.empty()) {
    out += "\n## Opponents:\n\n";
    out += r.mode == InputMode::kCode
               ? "Your agent will play against a mixture of the following "
                 "opponent programs (mixture probability in parentheses).\n\n"
               : "Your agent will play against a mixture of opponents with the "
                 "following behavior (mixture probability in parentheses).\n\n";
    for (const auto& o : r.opponents) {
      out += "### " + o.id + " (" + FormatDouble(o.prob) + ")\n\n";
      out += r.mode == InputMode::kCode ? Fenced(o.payload) : o.payload + "\n";
      out += "\n";
    }
  }
  if (r.current) {
    out += "\n## Current program:\n\n" + Fenced(r.current->source) + "\n";
    out += FeedbackTable(*r.current);
  }
  out += "\n## Task:\n\n";
  if (!r.current) {
    out +=
        "Write an `Agent` that maximizes its expected total wins against the "
        "opponents. Return the complete program, with any imports it needs, "
        "in a single ```python code block.\n";
  } else if (r.edit == EditMode::kRewrite) {
    out +=
        "Improve the current program so that it scores higher against the "
        "opponents. Return the complete improved program in a single "
        "```python code block.\n";
  } else {
    out += "Improve the current program so that it scores higher against the "
           "opponents. Describe each change as a block of the form\n\n";
    out += std::string(kSearch) + "\n<exact lines of the current program>\n" +
           std::string(kDivider) + "\n<replacement lines>\n" +
           std::string(kReplace) + "\n\n";
    out += "Every SEARCH section must match the current program exactly; each "
           "block replaces all matching occurrences.\n";
  }
  return out;
}

std::string LeducPrompt(const PromptRequest& r) {
  std::string tmpl = LeducPromptTemplate();
  std::map<std::string, std::string> values;
  const bool with_opponents = r.mode != InputMode::kNone && !r.opponents.empty();
  if (!with_opponents) {
    const size_t at = tmpl.find(kLeducOpponentSection);
    if (at == std::string::npos) {
      throw std::logic_error("Leduc template has no opponent section");
    }
    tmpl.erase(at, kLeducOpponentSection.size());
  } else {
    std::string instances;
    for (const auto& o : r.opponents) {
      instances += "\n## Opponent " + o.id + " (mixture probability " +
                   FormatDouble(o.prob) + ")\n";
      instances += r.mode == InputMode::kCode ? Fenced(o.payload) : o.payload + "\n";
    }
    values["instances"] = instances;
  }
  const std::string& program = r.current ? r.current->source : r.base_program;
  if (program.empty()) {
    throw std::invalid_argument("Leduc prompts need a program to improve");
  }
  std::string code = Fenced(program);
  if (r.current) code += "\n" + FeedbackTable(*r.current);
  values["code"] = code;
  values["replace"] = std::string(kReplace);
  values["lazy_prompt"] = std::string(kLazyPrompt);
  values["task_instruction"] =
      r.edit == EditMode::kPatch
          ? "Suggest improvements to the bot that increase its scores against "
            "the opponents."
          : "Suggest a substantially different strategy for the bot, replacing "
            "as much of the program as needed.";
  values["focus_sentence"] =
      r.current ? "Focus on the opponents where the current program scores "
                  "lowest."
                : "";
  values["trigger_chain_of_thought"] =
      "Think step by step about the opponents and the program before "
      "answering.";
  return FormatTemplate(tmpl, values);
}

bool LooksLikeCode(std::string_view line) {
  static const std::vector<std::string_view> kStarts = {
      "import ", "from ", "class ", "def ", "@", "#!", "# native-policy:"};
  for (auto s : kStarts) {
    if (line.substr(0, s.size()) == s) return true;
  }
  return false;
}

}  // namespace

std::string FormatTemplate(std::string_view text,
                           const std::map<std::string, std::string>& values) {
  std::string out;
  std::vector<std::string> missing;
  for (size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '{' && i + 1 < text.size() && text[i + 1] == '{') {
      out += '{';
      ++i;
    } else if (c == '}' && i + 1 < text.size() && text[i + 1] == '}') {
      out += '}';
      ++i;
    } else if (c == '{') {
      const size_t close = text.find('}', i);
      if (close == std::string_view::npos) {
        throw TemplateError("unbalanced '{' in template", {});
      }
      const std::string name(text.substr(i + 1, close - i - 1));
      auto it = values.find(name);
      if (it == values.end()) {
        if (std::find(missing.begin(), missing.end(), name) == missing.end()) {
          missing.push_back(name);
        }
      } else {
        out += it->second;
      }
      i = close;
    } else if (c == '}') {
      throw TemplateError("unbalanced '}' in template", {});
    } else {
      out += c;
    }
  }
  if (!missing.empty()) {
    std::string msg = "template placeholders without values:";
    for (const auto& m : missing) msg += " " + m;
    throw TemplateError(msg, missing);
  }
  return out;
}

void OpponentFilter::Validate() const {
  if (kind == Kind::kTopK && k < 1) throw std::invalid_argument("top-k needs k >= 1");
  if (kind == Kind::kMinSupport && !(tau > 0 && tau <= 1)) {
    throw std::invalid_argument("min-support needs 0 < tau <= 1");
  }
}

std::vector<std::pair<int, double>> FilterOpponents(const Eigen::VectorXd& sigma,
                                                    const OpponentFilter& filter) {
  filter.Validate();
  if (sigma.size() == 0) throw std::invalid_argument("empty meta-strategy");
  std::vector<std::pair<int, double>> out;
  switch (filter.kind) {
    case OpponentFilter::Kind::kNone:
      for (int i = 0; i < sigma.size(); ++i) {
        if (sigma[i] > 0) out.push_back({i, sigma[i]});
      }
      break;
    case OpponentFilter::Kind::kMinSupport:
      for (int i = 0; i < sigma.size(); ++i) {
        if (sigma[i] > 0 && sigma[i] >= filter.tau) out.push_back({i, sigma[i]});
      }
      break;
    case OpponentFilter::Kind::kTopK: {
      std::vector<int> order(sigma.size());
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](int a, int b) { return sigma[a] > sigma[b]; });
      for (int i : order) {
        if (static_cast<int>(out.size()) == filter.k || !(sigma[i] > 0)) break;
        out.push_back({i, sigma[i]});
      }
      break;
    }
  }
  if (out.empty()) {
    int best = 0;
    for (int i = 1; i < sigma.size(); ++i) {
      if (sigma[i] > sigma[best]) best = i;
    }
    out.push_back({best, sigma[best]});
  }
  return out;
}

std::string_view InputModeName(InputMode mode) {
  switch (mode) {
    case InputMode::kCode:
      return "code";
    case InputMode::kDescription:
      return "description";
    case InputMode::kNone:
      return "none";
  }
  return "?";
}

std::optional<InputMode> ParseInputMode(std::string_view name) {
  for (InputMode m : {InputMode::kCode, InputMode::kDescription, InputMode::kNone}) {
    if (InputModeName(m) == name) return m;
  }
  return std::nullopt;
}

std::string ConstructPrompt(const PromptRequest& request) {
  return request.game == GameId::kRrps ? RrpsPrompt(request) : LeducPrompt(request);
}

std::string ExtractProgram(std::string_view text) {
  const auto lines = Lines(text);
  // Fenced blocks: an opening ``` line (any info string) up to a closing ```.
  std::string best;
  bool found = false;
  for (size_t i = 0; i < lines.size(); ++i) {
    if (TrimRight(lines[i]).substr(0, 3) != "```") continue;
    size_t j = i + 1;
    while (j < lines.size() && TrimRight(lines[j]) != "```") ++j;
    if (j == lines.size()) break;  // unterminated fence
    std::string block = Join(lines, i + 1, j);
    if (!found || block.size() > best.size()) best = std::move(block);
    found = true;
    i = j;
  }
  if (found) {
    if (best.find_first_not_of(" \t\r\n") == std::string::npos) {
      throw MalformedGenerationError("empty code block");
    }
    return best + "\n";
  }
  size_t first = lines.size();
  for (size_t i = 0; i < lines.size(); ++i) {
    if (LooksLikeCode(lines[i])) {
      first = i;
      break;
    }
  }
  if (first == lines.size()) {
    throw MalformedGenerationError("completion contains no program");
  }
  // Trailing prose: unindented lines that do not look like code.
  size_t last = first;
  for (size_t i = first; i < lines.size(); ++i) {
    const auto l = TrimRight(lines[i]);
    if (l.empty()) continue;
    const bool indented = l[0] == ' ' || l[0] == '\t';
    const bool closer = l[0] == ')' || l[0] == ']' || l[0] == '}';
    const bool assignment = l.find(" = ") != std::string_view::npos;
    if (indented || closer || assignment || LooksLikeCode(l) || l[0] == '#') {
      last = i;
    }
  }
  return Join(lines, first, last + 1) + "\n";
}

PatchSet ParsePatchSet(std::string_view text) {
  const auto lines = Lines(text);
  PatchSet out;
  for (size_t i = 0; i < lines.size(); ++i) {
    if (TrimRight(lines[i]) != kSearch) continue;
    size_t div = i + 1;
    while (div < lines.size() && TrimRight(lines[div]) != kDivider) ++div;
    size_t end = div + 1;
    while (end < lines.size() && TrimRight(lines[end]) != kReplace) ++end;
    if (div >= lines.size() || end >= lines.size()) {
      throw MalformedGenerationError("unterminated SEARCH/REPLACE block " +
                                     std::to_string(out.size()));
    }
    PatchBlock b{Join(lines, i + 1, div), Join(lines, div + 1, end)};
    if (b.search.empty()) {
      throw MalformedGenerationError("empty SEARCH section in block " +
                                     std::to_string(out.size()));
    }
    out.push_back(std::move(b));
    i = end;
  }
  return out;
}

std::string ApplyPatchSet(const std::string& program, const PatchSet& patches) {
  std::string out = program;
  for (size_t b = 0; b < patches.size(); ++b) {
    const auto& p = patches[b];
    if (p.search.empty()) {
      throw PatchError(static_cast<int>(b), "empty SEARCH in block " +
                                                std::to_string(b));
    }
    std::string next;
    size_t pos = 0;
    int hits = 0;
    for (size_t at; (at = out.find(p.search, pos)) != std::string::npos;) {
      next.append(out, pos, at - pos);
      next += p.replace;
      pos = at + p.search.size();
      ++hits;
    }
    if (hits == 0) {
      throw PatchError(static_cast<int>(b),
                       "SEARCH block " + std::to_string(b) +
                           " does not match the program");
    }
    next.append(out, pos);
    out = std::move(next);
  }
  return out;
}

std::string ProgramFromCompletion(std::string_view completion,
                                  const std::string& base) {
  const PatchSet patches = ParsePatchSet(completion);
  if (patches.empty()) return ExtractProgram(completion);
  if (base.empty()) {
    throw MalformedGenerationError("patch blocks but no program to patch");
  }
  return ApplyPatchSet(base, patches);
}

}  // namespace csro
