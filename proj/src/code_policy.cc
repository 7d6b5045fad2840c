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

#include "csro/code_policy.h"

#include <errno.h>
#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <regex>
#include <sstream>
#include <thread>

#include "csro/populations.h"

namespace csro {
namespace {

constexpr size_t kMaxLineBytes = 1 << 20;
constexpr size_t kMaxStderrBytes = 1 << 16;

using Clock = std::chrono::steady_clock;

constexpr auto kSpawn = PolicyError::Kind::kSpawn;
constexpr auto kCrashed = PolicyError::Kind::kCrashed;
constexpr auto kMalformed = PolicyError::Kind::kMalformed;

// One running host process. Its stdin and stdout are the two directions of a
// socket pair, which lets writes use MSG_NOSIGNAL instead of relying on
// process-wide SIGPIPE handling.
class HostProcess {
 public:
  explicit HostProcess(const std::vector<std::string>& argv) {
    int io[2];
    int err[2];
    int exec_status[2];
    if (socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, io) != 0) {
      throw PolicyError(kSpawn, std::string("socketpair: ") + strerror(errno));
    }
    if (pipe2(err, O_CLOEXEC) != 0 || pipe2(exec_status, O_CLOEXEC) != 0) {
      close(io[0]);
      close(io[1]);
      throw PolicyError(kSpawn, std::string("pipe: ") + strerror(errno));
    }
    std::vector<char*> cargv;
    for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
    cargv.push_back(nullptr);

    pid_ = fork();
    if (pid_ < 0) {
      const int e = errno;
      for (int fd : {io[0], io[1], err[0], err[1], exec_status[0],
                     exec_status[1]}) {
        close(fd);
      }
      throw PolicyError(kSpawn, std::string("fork: ") + strerror(e));
    }
    if (pid_ == 0) {
      // Child: only async-signal-safe calls from here on.
      dup2(io[1], STDIN_FILENO);
      dup2(io[1], STDOUT_FILENO);
      dup2(err[1], STDERR_FILENO);
      execvp(cargv[0], cargv.data());
      const int e = errno;
      [[maybe_unused]] ssize_t n = write(exec_status[1], &e, sizeof(e));
      _exit(127);
    }
    close(io[1]);
    close(err[1]);
    close(exec_status[1]);
    io_fd_ = io[0];
    err_fd_ = err[0];
    fcntl(err_fd_, F_SETFL, fcntl(err_fd_, F_GETFL) | O_NONBLOCK);

    int exec_errno = 0;
    ssize_t n;
    do {
      n = read(exec_status[0], &exec_errno, sizeof(exec_errno));
    } while (n < 0 && errno == EINTR);
    close(exec_status[0]);
    if (n == sizeof(exec_errno)) {
      Shutdown();
      throw PolicyError(kSpawn, "cannot execute '" + argv[0] +
                                    "': " + strerror(exec_errno));
    }
  }

  ~HostProcess() { Shutdown(); }

  HostProcess(const HostProcess&) = delete;
  HostProcess& operator=(const HostProcess&) = delete;

  // Sends one request and returns the response with the same seq. Responses
  // to earlier requests (left over after a timeout) are skipped.
  OrderedJson Request(std::string_view type, OrderedJson payload,
                      int timeout_ms, PolicyError::Kind timeout_kind) {
    if (broken_) Fail(kCrashed, "host is no longer usable");
    const long long seq = seq_++;
    std::string line = WireMessage(type, std::move(payload), seq).dump();
    line += '\n';
    Send(line);
    const auto deadline = Clock::now() + std::chrono::milliseconds(timeout_ms);
    while (true) {
      const std::string reply = ReadLine(deadline, timeout_kind);
      const Json msg = Json::parse(reply, nullptr, /*allow_exceptions=*/false);
      if (msg.is_discarded() || !msg.is_object() || !msg.contains("seq") ||
          !msg["seq"].is_number_integer() || !msg.contains("type") ||
          !msg["type"].is_string()) {
        Fail(kMalformed, "malformed message from host: " + Clip(reply));
      }
      const long long got = msg["seq"].get<long long>();
      if (got < seq) continue;
      if (got > seq) {
        Fail(kMalformed, "host answered unknown seq " + std::to_string(got));
      }
      return OrderedJson(msg);
    }
  }

  std::string Stderr() {
    DrainStderr();
    return err_buf_;
  }

  // Marks the process unusable and throws.
  [[noreturn]] void Fail(PolicyError::Kind kind, const std::string& what) {
    if (kind != PolicyError::Kind::kTimeout &&
        kind != PolicyError::Kind::kAgentError) {
      broken_ = true;
    }
    throw PolicyError(kind, what, Stderr());
  }

 private:
  static std::string Clip(const std::string& s) {
    return s.size() > 200 ? s.substr(0, 200) + "..." : s;
  }

  void Send(const std::string& data) {
    size_t off = 0;
    while (off < data.size()) {
      const ssize_t n =
          send(io_fd_, data.data() + off, data.size() - off, MSG_NOSIGNAL);
      if (n < 0) {
        if (errno == EINTR) continue;
        Fail(kCrashed, std::string("host closed its input: ") + strerror(errno));
      }
      off += static_cast<size_t>(n);
    }
  }

  std::string ReadLine(Clock::time_point deadline,
                       PolicyError::Kind timeout_kind) {
    while (true) {
      const size_t nl = out_buf_.find('\n');
      if (nl != std::string::npos) {
        std::string line = out_buf_.substr(0, nl);
        out_buf_.erase(0, nl + 1);
        return line;
      }
      if (out_buf_.size() > kMaxLineBytes) {
        Fail(kMalformed, "host line exceeds " + std::to_string(kMaxLineBytes) +
                             " bytes");
      }
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
                            deadline - Clock::now())
                            .count();
      if (left <= 0) {
        Fail(timeout_kind, "host did not answer in time");
      }
      pollfd fds[2] = {{io_fd_, POLLIN, 0}, {err_fd_, POLLIN, 0}};
      const int nfds = err_fd_ >= 0 ? 2 : 1;
      const int r = poll(fds, nfds, static_cast<int>(left));
      if (r < 0) {
        if (errno == EINTR) continue;
        Fail(kCrashed, std::string("poll: ") + strerror(errno));
      }
      if (nfds == 2 && (fds[1].revents & (POLLIN | POLLHUP))) DrainStderr();
      if (fds[0].revents & (POLLIN | POLLHUP | POLLERR)) {
        char buf[4096];
        const ssize_t n = recv(io_fd_, buf, sizeof(buf), 0);
        if (n < 0 && errno == EINTR) continue;
        if (n <= 0) {
          Fail(kCrashed, "host exited" + ExitDescription());
        }
        out_buf_.append(buf, static_cast<size_t>(n));
      }
    }
  }

  void DrainStderr() {
    if (err_fd_ < 0) return;
    char buf[4096];
    while (true) {
      const ssize_t n = read(err_fd_, buf, sizeof(buf));
      if (n > 0) {
        const size_t room = kMaxStderrBytes - std::min(kMaxStderrBytes,
                                                       err_buf_.size());
        err_buf_.append(buf, std::min(room, static_cast<size_t>(n)));
        continue;
      }
      if (n < 0 && errno == EINTR) continue;
      if (n == 0) {
        close(err_fd_);
        err_fd_ = -1;
      }
      return;
    }
  }

  // Reaps the child if it already exited and describes how.
  std::string ExitDescription() {
    if (pid_ <= 0) return "";
    int status = 0;
    for (int i = 0; i < 50; ++i) {
      const pid_t r = waitpid(pid_, &status, WNOHANG);
      if (r == pid_) {
        pid_ = -1;
        if (WIFEXITED(status)) {
          return " with status " + std::to_string(WEXITSTATUS(status));
        }
        if (WIFSIGNALED(status)) {
          return " on signal " + std::to_string(WTERMSIG(status));
        }
        return "";
      }
      if (r < 0) return "";
      std::this_thread::sleep_for(std::chrono::milliseconds(1));
    }
    return "";
  }

  void Shutdown() {
    if (io_fd_ >= 0) {
      shutdown(io_fd_, SHUT_WR);
    }
    if (pid_ > 0) {
      // Give a well-behaved host a moment to exit on EOF, then kill it.
      int status = 0;
      bool reaped = false;
      for (int i = 0; i < 200 && !reaped; ++i) {
        const pid_t r = waitpid(pid_, &status, WNOHANG);
        if (r == pid_ || r < 0) {
          reaped = true;
        } else {
          std::this_thread::sleep_for(std::chrono::milliseconds(1));
        }
      }
      if (!reaped) {
        kill(pid_, SIGKILL);
        while (waitpid(pid_, &status, 0) < 0 && errno == EINTR) {
        }
      }
      pid_ = -1;
    }
    if (io_fd_ >= 0) close(io_fd_);
    if (err_fd_ >= 0) close(err_fd_);
    io_fd_ = err_fd_ = -1;
  }

  pid_t pid_ = -1;
  int io_fd_ = -1;
  int err_fd_ = -1;
  long long seq_ = 0;
  bool broken_ = false;
  std::string out_buf_;
  std::string err_buf_;
};

class HostAgent final : public Agent {
 public:
  HostAgent(const HostConfig& config, const std::string& source_path,
            GameId game, uint64_t seed)
      : config_(config), proc_(Argv(config, source_path, game)) {
    OrderedJson init = OrderedJson::object();
    init["game"] = GameName(game);
    init["seed"] = seed;
    OrderedJson reply = proc_.Request("INIT", std::move(init),
                                      config_.handshake_timeout_ms,
                                      PolicyError::Kind::kHandshakeTimeout);
    if (reply["type"] == "ERROR") {
      proc_.Fail(PolicyError::Kind::kLoad,
                 "host failed to load the policy: " + ErrorText(reply));
    }
    Expect(reply, "INIT");
  }

  void Restart(int player_id) override {
    OrderedJson payload = OrderedJson::object();
    payload["player_id"] = player_id;
    Expect(Call("RESTART", std::move(payload)), "RESTART");
  }

  void ReceiveOutcome(const leduc::Observation& outcome) override {
    Expect(Call("OUTCOME", leduc::ToJson(outcome)), "OUTCOME");
  }

  std::string Act(const Observation& obs) override {
    OrderedJson reply = Call("ACT_REQUEST", ObservationToJson(obs));
    Expect(reply, "ACT_RESPONSE");
    if (!reply.contains("payload") || !reply["payload"].is_string()) {
      proc_.Fail(kMalformed, "ACT_RESPONSE payload is not a string");
    }
    return reply["payload"].get<std::string>();
  }

 private:
  static std::vector<std::string> Argv(const HostConfig& config,
                                       const std::string& source_path,
                                       GameId game) {
    std::vector<std::string> argv = config.command;
    argv.insert(argv.end(),
                {"--source", source_path, "--game", std::string(GameName(game))});
    return argv;
  }

  static std::string ErrorText(const OrderedJson& reply) {
    const auto& p = reply.contains("payload") ? reply["payload"] : OrderedJson();
    std::string text;
    if (p.is_object()) {
      if (p.contains("message") && p["message"].is_string()) {
        text = p["message"].get<std::string>();
      }
      if (p.contains("traceback") && p["traceback"].is_string()) {
        text += "\n" + p["traceback"].get<std::string>();
      }
    } else if (p.is_string()) {
      text = p.get<std::string>();
    }
    return text.empty() ? "(no message)" : text;
  }

  OrderedJson Call(std::string_view type, OrderedJson payload) {
    OrderedJson reply = proc_.Request(type, std::move(payload),
                                      config_.move_timeout_ms,
                                      PolicyError::Kind::kTimeout);
    if (reply["type"] == "ERROR") {
      proc_.Fail(PolicyError::Kind::kAgentError,
                 "policy raised: " + ErrorText(reply));
    }
    return reply;
  }

  void Expect(const OrderedJson& reply, std::string_view type) {
    if (reply["type"] != type) {
      proc_.Fail(kMalformed, "expected " + std::string(type) + ", got " +
                                 reply["type"].get<std::string>());
    }
  }

  HostConfig config_;
  HostProcess proc_;
};

std::string WriteSourceFile(const HostConfig& host, const std::string& source) {
  namespace fs = std::filesystem;
  fs::path dir = host.scratch_dir.empty()
                     ? fs::temp_directory_path() / "csro-policies"
                     : fs::path(host.scratch_dir);
  fs::create_directories(dir);
  const fs::path path = dir / (ContentHash(source) + ".py");
  if (fs::exists(path)) return path.string();
  // Write under a unique name, then rename, so concurrent writers of the
  // same content never expose a partial file.
  static std::atomic<uint64_t> counter{0};
  const fs::path tmp =
      dir / (path.filename().string() + ".tmp" + std::to_string(getpid()) +
             "." + std::to_string(counter++));
  WriteFile(tmp.string(), source);
  fs::rename(tmp, path);
  return path.string();
}

}  // namespace

std::vector<std::string> HostConfig::SplitCommand(std::string_view command) {
  std::vector<std::string> out;
  std::istringstream in{std::string(command)};
  std::string word;
  while (in >> word) out.push_back(word);
  return out;
}

HostConfig HostConfig::FromEnvironment() {
  HostConfig config;
  if (const char* env = std::getenv("CSRO_POLICY_HOST")) {
    config.command = SplitCommand(env);
  }
  return config;
}

std::optional<std::string> NativeBindingName(std::string_view source) {
  static const std::regex kMarker(R"(^[ \t]*#[ \t]*native-policy:[ \t]*([A-Za-z0-9_]+)[ \t]*$)");
  std::istringstream in{std::string(source)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::smatch m;
    if (std::regex_match(line, m, kMarker)) return m[1].str();
  }
  return std::nullopt;
}

OrderedJson WireMessage(std::string_view type, OrderedJson payload,
                        long long seq) {
  OrderedJson msg = OrderedJson::object();
  msg["type"] = type;
  msg["payload"] = std::move(payload);
  msg["seq"] = seq;
  return msg;
}

PolicyHandle SpawnCodePolicy(std::string id, std::string source, GameId game,
                             const HostConfig& host) {
  if (source.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw PolicyError(PolicyError::Kind::kLoad,
                      "code policy '" + id + "' has empty source");
  }
  const auto binding = NativeBindingName(source);
  const bool use_host = !host.command.empty() && (!binding || host.prefer_host);
  if (!use_host) {
    if (!binding) {
      throw PolicyError(PolicyError::Kind::kUnavailable,
                        "no policy host configured to run code policy '" +
                            id + "'");
    }
    const auto bot = FindBot(game, *binding);
    if (!bot) {
      throw PolicyError(PolicyError::Kind::kLoad,
                        "unknown native policy '" + *binding + "' for " +
                            std::string(GameName(game)));
    }
    const PolicyHandle native = bot->factory();
    return PolicyHandle(
        std::move(id), game, PolicyKind::kCode,
        [native](uint64_t seed) { return native.NewAgent(seed); },
        std::move(source));
  }
  const std::string path = WriteSourceFile(host, source);
  { HostAgent probe(host, path, game, 0); }
  return PolicyHandle(
      std::move(id), game, PolicyKind::kCode,
      [host, path, game](uint64_t seed) -> std::unique_ptr<Agent> {
        return std::make_unique<HostAgent>(host, path, game, seed);
      },
      std::move(source));
}

}  // namespace csro
