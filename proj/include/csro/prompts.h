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

#ifndef CSRO_PROMPTS_H_
#define CSRO_PROMPTS_H_

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "csro/game.h"
#include "csro/meta_game.h"

// Prompt text for the response oracle, and parsing of what comes back.
namespace csro {

const std::string& RrpsPromptTemplate();
const std::string& LeducPromptTemplate();

// A placeholder had no value, or a brace was unbalanced.
class TemplateError : public std::invalid_argument {
 public:
  TemplateError(const std::string& message, std::vector<std::string> missing)
      : std::invalid_argument(message), missing_(std::move(missing)) {}
  const std::vector<std::string>& missing() const { return missing_; }

 private:
  std::vector<std::string> missing_;
};

// Replaces {name} with values.at(name); "{{" and "}}" produce literal braces.
// All missing names are collected and reported together.
std::string FormatTemplate(std::string_view text,
                           const std::map<std::string, std::string>& values);

// --- Opponent selection ----------------------------------------------------

struct OpponentFilter {
  enum class Kind { kNone, kTopK, kMinSupport };
  Kind kind = Kind::kNone;
  int k = 5;
  double tau = 0.05;

  static OpponentFilter None() { return {}; }
  static OpponentFilter TopK(int k) { return {Kind::kTopK, k, 0.05}; }
  static OpponentFilter MinSupport(double tau) {
    return {Kind::kMinSupport, 5, tau};
  }
  void Validate() const;
};

// (bank index, probability) of the opponents to show. TopK: the k largest
// (ties to the lower index), in descending probability. MinSupport: prob >=
// tau, in bank order. None: the full support in bank order. Never empty: if
// nothing qualifies the single most likely member is returned.
std::vector<std::pair<int, double>> FilterOpponents(const Eigen::VectorXd& sigma,
                                                    const OpponentFilter& filter);

// --- Prompt construction ---------------------------------------------------

enum class InputMode { kCode, kDescription, kNone };
std::string_view InputModeName(InputMode mode);
std::optional<InputMode> ParseInputMode(std::string_view name);

struct OpponentEntry {
  std::string id;
  double prob = 0;
  // Source text (code mode) or summary (description mode).
  std::string payload;
};

// The program being refined and how it scored.
struct ProgramFeedback {
  std::string source;
  std::vector<OpponentScore> scores;
  double score = 0;
};

enum class EditMode {
  kRewrite,  // answer with a complete program
  kPatch,    // answer with SEARCH/REPLACE blocks
};

struct PromptRequest {
  GameId game = GameId::kRrps;
  InputMode mode = InputMode::kCode;
  std::vector<OpponentEntry> opponents;
  // Set for refinement and evolution.
  std::optional<ProgramFeedback> current;
  // Leduc: the program shown when there is no current one.
  std::string base_program;
  EditMode edit = EditMode::kRewrite;
};

// Deterministic. RRPS: the task template followed by opponent, current
// program and task sections. Leduc: the full template with its placeholders
// filled; the opponent section is removed in kNone mode.
std::string ConstructPrompt(const PromptRequest& request);

// --- Completions ------------------------------------------------------------

// The completion could not be turned into a program.
class MalformedGenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Largest fenced code block; without fences, the text from the first line
// that looks like code to the last one. Throws MalformedGenerationError if
// there is no code.
std::string ExtractProgram(std::string_view text);

struct PatchBlock {
  std::string search;
  std::string replace;
};
using PatchSet = std::vector<PatchBlock>;

// All SEARCH/REPLACE blocks in order (empty if there are none). Unterminated
// blocks and empty SEARCH sections throw MalformedGenerationError.
PatchSet ParsePatchSet(std::string_view text);

class PatchError : public std::runtime_error {
 public:
  PatchError(int block, const std::string& message)
      : std::runtime_error(message), block_(block) {}
  int block() const { return block_; }

 private:
  int block_;
};

// Applies blocks in order, each replacing every occurrence of its search
// text. Throws PatchError naming the first block that matches nothing; the
// input is never modified.
std::string ApplyPatchSet(const std::string& program, const PatchSet& patches);

// Patches applied to `base` when the completion has SEARCH/REPLACE blocks,
// otherwise ExtractProgram.
std::string ProgramFromCompletion(std::string_view completion,
                                  const std::string& base);

}  // namespace csro

#endif  // CSRO_PROMPTS_H_
