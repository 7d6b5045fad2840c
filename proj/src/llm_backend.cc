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

#include "csro/llm_backend.h"

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <thread>

#include "httplib.h"

namespace csro {

namespace fs = std::filesystem;

MockBackend::MockBackend(std::string fixture_dir) : dir_(std::move(fixture_dir)) {
  if (!fs::is_directory(dir_)) {
    throw std::invalid_argument("mock fixture directory not found: " + dir_);
  }
  const fs::path fallback = fs::path(dir_) / "fallback";
  if (fs::is_directory(fallback)) {
    for (const auto& e : fs::directory_iterator(fallback)) {
      if (e.is_regular_file() && e.path().extension() == ".txt") {
        fallbacks_.push_back(e.path().string());
      }
    }
    std::sort(fallbacks_.begin(), fallbacks_.end());
  }
}

std::string MockBackend::Complete(const std::string& prompt) {
  const std::string hash = ContentHash(prompt);
  const fs::path exact = fs::path(dir_) / (hash + ".txt");
  if (fs::exists(exact)) {
    CountCall();
    return ReadFile(exact.string());
  }
  if (fallbacks_.empty()) {
    throw BackendError("no mock completion for prompt " + hash + " in " + dir_);
  }
  const uint64_t h = std::stoull(hash, nullptr, 16);
  CountCall();
  return ReadFile(fallbacks_[h % fallbacks_.size()]);
}

ScriptedBackend::ScriptedBackend(Fn fn, std::string name)
    : fn_(std::move(fn)), name_(std::move(name)) {}

std::unique_ptr<ScriptedBackend> ScriptedBackend::FromList(
    std::vector<std::string> completions) {
  return std::make_unique<ScriptedBackend>(
      [completions = std::move(completions)](const std::string&, int call) {
        if (call >= static_cast<int>(completions.size())) {
          throw BackendError("scripted backend exhausted");
        }
        return completions[call];
      });
}

std::string ScriptedBackend::Complete(const std::string& prompt) {
  std::lock_guard<std::mutex> lock(mu_);
  prompts_.push_back(prompt);
  std::string out = fn_(prompt, next_++);
  CountCall();
  return out;
}

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
  if (config_.endpoint.rfind("http://", 0) != 0 &&
      config_.endpoint.rfind("https://", 0) != 0) {
    throw std::invalid_argument("endpoint must start with http:// or https://");
  }
}

std::string HttpBackend::ParseResponse(const std::string& body) {
  Json j;
  try {
    j = Json::parse(body);
  } catch (const Json::exception& e) {
    throw BackendError(std::string("response is not JSON: ") + e.what());
  }
  if (j.contains("choices") && j["choices"].is_array() && !j["choices"].empty()) {
    const Json& c = j["choices"][0];
    if (c.contains("message") && c["message"].contains("content") &&
        c["message"]["content"].is_string()) {
      return c["message"]["content"].get<std::string>();
    }
  }
  if (j.contains("content") && j["content"].is_array()) {
    std::string text;
    for (const auto& part : j["content"]) {
      if (part.contains("text") && part["text"].is_string()) {
        text += part["text"].get<std::string>();
      }
    }
    if (!text.empty()) return text;
  }
  throw BackendError("unrecognized response shape");
}

std::string HttpBackend::Complete(const std::string& prompt) {
  // Split "scheme://host[:port]" from the path.
  const size_t scheme_end = config_.endpoint.find("://") + 3;
  const size_t path_start = config_.endpoint.find('/', scheme_end);
  const std::string base = config_.endpoint.substr(0, path_start);
  const std::string path =
      path_start == std::string::npos ? "/" : config_.endpoint.substr(path_start);

  OrderedJson body = OrderedJson::object();
  body["model"] = config_.model;
  body["messages"] = OrderedJson::array(
      {OrderedJson{{"role", "user"}, {"content", prompt}}});
  body["temperature"] = config_.temperature;
  body["max_tokens"] = config_.max_tokens;

  httplib::Headers headers;
  if (!config_.api_key_env.empty()) {
    const char* key = std::getenv(config_.api_key_env.c_str());
    if (key == nullptr || *key == '\0') {
      throw BackendError("environment variable " + config_.api_key_env +
                         " is not set");
    }
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  std::string last_error;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(200 << std::min(attempt, 6)));
    }
    httplib::Client client(base);
    client.set_connection_timeout(config_.timeout_s, 0);
    client.set_read_timeout(config_.timeout_s, 0);
    client.set_write_timeout(config_.timeout_s, 0);
    auto res = client.Post(path, headers, body.dump(), "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw BackendError("HTTP " + std::to_string(res->status) + ": " +
                         res->body.substr(0, 500));
    }
    std::string text = ParseResponse(res->body);
    CountCall();
    return text;
  }
  throw BackendError("request failed after retries: " + last_error);
}

}  // namespace csro
