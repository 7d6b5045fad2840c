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

#ifndef CSRO_LLM_BACKEND_H_
#define CSRO_LLM_BACKEND_H_

#include <atomic>
#include <functional>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "csro/util.h"

namespace csro {

class BackendError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// complete(prompt) -> text. Implementations are safe to call concurrently.
class LlmBackend {
 public:
  virtual ~LlmBackend() = default;
  virtual std::string Complete(const std::string& prompt) = 0;
  // Stable name, part of cache keys ("mock:<dir>", "http:<model>", ...).
  virtual std::string id() const = 0;
  // Completed calls so far.
  long calls() const { return calls_.load(); }

 protected:
  void CountCall() { ++calls_; }

 private:
  std::atomic<long> calls_{0};
};

// Replays completions from a fixture directory. A prompt whose content hash
// names a file "<hash>.txt" gets that file; otherwise, if "fallback/*.txt"
// exists, the files are sorted by name and one is picked by hash modulo
// count. No match is a BackendError naming the hash.
class MockBackend : public LlmBackend {
 public:
  explicit MockBackend(std::string fixture_dir);
  std::string Complete(const std::string& prompt) override;
  std::string id() const override { return "mock:" + dir_; }

 private:
  std::string dir_;
  std::vector<std::string> fallbacks_;
};

// Calls fn(prompt, call_index) under a lock, so call indices are the order of
// arrival. For tests.
class ScriptedBackend : public LlmBackend {
 public:
  using Fn = std::function<std::string(const std::string& prompt, int call)>;
  explicit ScriptedBackend(Fn fn, std::string name = "scripted");
  // Returns the listed completions in order, then throws BackendError.
  static std::unique_ptr<ScriptedBackend> FromList(
      std::vector<std::string> completions);

  std::string Complete(const std::string& prompt) override;
  std::string id() const override { return name_; }
  const std::vector<std::string>& prompts() const { return prompts_; }

 private:
  Fn fn_;
  std::string name_;
  std::mutex mu_;
  int next_ = 0;
  std::vector<std::string> prompts_;
};

struct HttpBackendConfig {
  // Full URL of a chat-completions style endpoint, http:// or https://.
  std::string endpoint;
  std::string model;
  // Environment variable holding the bearer token; empty sends none.
  std::string api_key_env;
  int timeout_s = 120;
  int max_retries = 3;
  double temperature = 1.0;
  int max_tokens = 8192;
};

// POSTs {"model", "messages": [{"role": "user", "content": prompt}], ...}.
// Reads choices[0].message.content, or the concatenated text parts of a
// "content" array. Retries transport errors, 429 and 5xx with backoff.
class HttpBackend : public LlmBackend {
 public:
  explicit HttpBackend(HttpBackendConfig config);
  std::string Complete(const std::string& prompt) override;
  std::string id() const override { return "http:" + config_.model; }

  // Extracts the completion text from a response body; BackendError if the
  // shape is not recognized.
  static std::string ParseResponse(const std::string& body);

 private:
  HttpBackendConfig config_;
};

}  // namespace csro

#endif  // CSRO_LLM_BACKEND_H_
