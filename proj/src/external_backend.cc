/* Copyright 2025 The s5kit Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "s5kit/external_backend.h"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <thread>
#include <vector>

#include <json.hpp>

#include "s5kit/error.h"
#include "s5kit/wav.h"

namespace s5kit {

namespace fs = std::filesystem;
using nlohmann::json;

class ExternalBackend::Process {
 public:
  Process(const std::string& command, std::chrono::milliseconds timeout)
      : command_(command), timeout_(timeout) {
    // A backend that exits mid-request must surface as an error, not kill us.
    static std::once_flag ignore_sigpipe;
    std::call_once(ignore_sigpipe, [] { ::signal(SIGPIPE, SIG_IGN); });

    int to_child[2], from_child[2];
    if (::pipe2(to_child, O_CLOEXEC) != 0) {
      throw Error(ErrorCode::kBackendSpawn, "pipe: " + std::string(std::strerror(errno)));
    }
    if (::pipe2(from_child, O_CLOEXEC) != 0) {
      ::close(to_child[0]);
      ::close(to_child[1]);
      throw Error(ErrorCode::kBackendSpawn, "pipe: " + std::string(std::strerror(errno)));
    }
    pid_ = ::fork();
    if (pid_ < 0) {
      for (int fd : {to_child[0], to_child[1], from_child[0], from_child[1]}) ::close(fd);
      throw Error(ErrorCode::kBackendSpawn, "fork: " + std::string(std::strerror(errno)));
    }
    if (pid_ == 0) {
      // Own process group, so the shell and anything it starts die together.
      ::setpgid(0, 0);
      ::dup2(to_child[0], STDIN_FILENO);
      ::dup2(from_child[1], STDOUT_FILENO);
      ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
      ::_exit(127);
    }
    ::setpgid(pid_, pid_);
    ::close(to_child[0]);
    ::close(from_child[1]);
    stdin_fd_ = to_child[1];
    stdout_fd_ = from_child[0];
  }

  ~Process() { Stop(); }

  bool running() const { return pid_ > 0; }

  void Stop() {
    if (stdin_fd_ >= 0) {
      static const char kShutdown[] = "{\"type\":\"shutdown\"}\n";
      [[maybe_unused]] auto n = ::write(stdin_fd_, kShutdown, sizeof(kShutdown) - 1);
      ::close(stdin_fd_);
      stdin_fd_ = -1;
    }
    if (stdout_fd_ >= 0) {
      ::close(stdout_fd_);
      stdout_fd_ = -1;
    }
    if (pid_ > 0) {
      int status = 0;
      for (int i = 0; i < 50; ++i) {
        if (::waitpid(pid_, &status, WNOHANG) == pid_) {
          pid_ = -1;
          return;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
      }
      ::kill(-pid_, SIGKILL);
      ::waitpid(pid_, &status, 0);
      pid_ = -1;
    }
  }

  void Send(const json& message) {
    if (!running()) throw Error(ErrorCode::kBackend, "backend is not running: " + command_);
    const std::string line = message.dump() + "\n";
    std::size_t written = 0;
    while (written < line.size()) {
      const ssize_t n = ::write(stdin_fd_, line.data() + written, line.size() - written);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) {
        const int status = Reap();
        throw Error(ErrorCode::kBackend, "backend closed its input (" + Describe(status) + ")");
      }
      written += static_cast<std::size_t>(n);
    }
  }

  json Receive() {
    if (!running()) throw Error(ErrorCode::kBackend, "backend is not running: " + command_);
    const auto deadline = std::chrono::steady_clock::now() + timeout_;
    while (true) {
      const auto newline = buffer_.find('\n');
      if (newline != std::string::npos) {
        const std::string line = buffer_.substr(0, newline);
        buffer_.erase(0, newline + 1);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
          return json::parse(line);
        } catch (const json::exception& e) {
          throw Error(ErrorCode::kProtocol, "backend sent invalid JSON: " + line);
        }
      }
      const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
          deadline - std::chrono::steady_clock::now());
      if (remaining.count() <= 0) {
        Kill();
        throw Error(ErrorCode::kTimeout, "backend did not answer within " +
                                             std::to_string(timeout_.count()) + " ms");
      }
      pollfd pfd{stdout_fd_, POLLIN, 0};
      const int ready = ::poll(&pfd, 1, static_cast<int>(remaining.count()));
      if (ready < 0 && errno == EINTR) continue;
      if (ready == 0) continue;
      char chunk[4096];
      const ssize_t n = ::read(stdout_fd_, chunk, sizeof(chunk));
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) {
        const int status = Reap();
        throw Error(ErrorCode::kBackend, "backend exited (" + Describe(status) + ")");
      }
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }

 private:
  void Kill() {
    if (pid_ > 0) ::kill(-pid_, SIGKILL);
    Reap();
  }

  int Reap() {
    int status = -1;
    if (pid_ > 0) {
      if (stdin_fd_ >= 0) ::close(stdin_fd_);
      if (stdout_fd_ >= 0) ::close(stdout_fd_);
      stdin_fd_ = stdout_fd_ = -1;
      ::waitpid(pid_, &status, 0);
      pid_ = -1;
    }
    return status;
  }

  static std::string Describe(int status) {
    if (status < 0) return "status unknown";
    if (WIFEXITED(status)) return "exit status " + std::to_string(WEXITSTATUS(status));
    if (WIFSIGNALED(status)) return "signal " + std::to_string(WTERMSIG(status));
    return "status " + std::to_string(status);
  }

  std::string command_;
  std::chrono::milliseconds timeout_;
  pid_t pid_ = -1;
  int stdin_fd_ = -1;
  int stdout_fd_ = -1;
  std::string buffer_;
};

namespace {

std::string MakeScratchDir(const std::string& root_option) {
  std::string root = root_option;
  if (root.empty()) {
    if (const char* env = std::getenv("S5KIT_SCRATCH_DIR"); env && *env) root = env;
  }
  if (root.empty()) root = fs::temp_directory_path().string();
  std::error_code ec;
  fs::create_directories(root, ec);
  std::string templ = (fs::absolute(root) / "s5kit-backend-XXXXXX").string();
  std::vector<char> buf(templ.begin(), templ.end());
  buf.push_back('\0');
  if (::mkdtemp(buf.data()) == nullptr) {
    throw Error(ErrorCode::kBackendSpawn,
                "cannot create scratch directory under " + root);
  }
  return std::string(buf.data());
}

std::string TypeOf(const json& message) {
  if (!message.is_object() || !message.contains("type") || !message["type"].is_string()) {
    throw Error(ErrorCode::kProtocol, "backend message without a type: " + message.dump());
  }
  return message["type"].get<std::string>();
}

void CheckResponse(const json& message, const std::string& expected_type,
                   std::uint64_t id) {
  const std::string type = TypeOf(message);
  if (!message.contains("id") || !message["id"].is_number_unsigned() ||
      message["id"].get<std::uint64_t>() != id) {
    throw Error(ErrorCode::kProtocol, "backend response id mismatch (expected " +
                                          std::to_string(id) + "): " + message.dump());
  }
  if (type == "error") {
    const std::string text =
        message.contains("message") && message["message"].is_string()
            ? message["message"].get<std::string>()
            : std::string("(no message)");
    throw Error(ErrorCode::kBackend, "backend error: " + text);
  }
  if (type != expected_type) {
    throw Error(ErrorCode::kProtocol,
                "expected '" + expected_type + "' response, got '" + type + "'");
  }
}

}  // namespace

ExternalBackend::ExternalBackend(ClassVocabulary vocab, ExternalBackendOptions options)
    : vocab_(std::move(vocab)), options_(std::move(options)) {
  if (options_.command.empty()) {
    throw Error(ErrorCode::kBackendSpawn, "empty backend command");
  }
  scratch_dir_ = MakeScratchDir(options_.scratch_root);
  try {
    process_ = std::make_unique<Process>(options_.command, options_.timeout);
    json hello = {{"type", "hello"},
                  {"version", kProtocolVersion},
                  {"vocabulary", vocab_.labels()},
                  {"scratch_dir", scratch_dir_}};
    json ack;
    try {
      process_->Send(hello);
      ack = process_->Receive();
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kBackend) {
        throw Error(ErrorCode::kBackendSpawn,
                    "backend '" + options_.command + "' failed during handshake: " + e.what());
      }
      throw;
    }
    if (TypeOf(ack) != "hello-ack") {
      throw Error(ErrorCode::kProtocol, "expected hello-ack, got " + ack.dump());
    }
    if (!ack.contains("version") || !ack["version"].is_number_integer()) {
      throw Error(ErrorCode::kProtocol, "hello-ack without a version field");
    }
    if (ack["version"].get<int>() != kProtocolVersion) {
      throw Error(ErrorCode::kProtocol,
                  "backend speaks protocol version " +
                      std::to_string(ack["version"].get<int>()) + ", expected " +
                      std::to_string(kProtocolVersion));
    }
  } catch (...) {
    process_.reset();
    std::error_code ec;
    fs::remove_all(scratch_dir_, ec);
    throw;
  }
}

ExternalBackend::~ExternalBackend() {
  process_.reset();
  std::error_code ec;
  fs::remove_all(scratch_dir_, ec);
}

LabelScores ExternalBackend::Tag(const AudioClip& clip) const {
  std::lock_guard<std::mutex> lock(mu_);
  const auto key = std::pair{Fingerprint(clip), std::string()};
  if (auto it = tag_cache_.find(key); it != tag_cache_.end()) return it->second;

  const std::uint64_t id = next_id_++;
  const std::string audio_path = scratch_dir_ + "/req-" + std::to_string(id) + ".wav";
  WriteWav(clip, audio_path, WavFormat::kFloat32);
  process_->Send({{"type", "tag"}, {"id", id}, {"audio_path", audio_path}});
  const json response = process_->Receive();
  std::error_code ec;
  fs::remove(audio_path, ec);
  CheckResponse(response, "scores", id);

  if (!response.contains("scores") || !response["scores"].is_object()) {
    throw Error(ErrorCode::kProtocol, "scores response without a scores object");
  }
  std::map<std::string, double> scores;
  for (const auto& [label, value] : response["scores"].items()) {
    if (!value.is_number()) {
      throw Error(ErrorCode::kValidation, "score for '" + label + "' is not a number");
    }
    scores[label] = value.get<double>();
  }
  LabelScores result = LabelScores::FromMap(vocab_, scores);
  tag_cache_.emplace(key, result);
  return result;
}

AudioClip ExternalBackend::Separate(const AudioClip& mixture, const std::string& label) const {
  vocab_.index(label);
  std::lock_guard<std::mutex> lock(mu_);
  const auto key = std::pair{Fingerprint(mixture), label};
  if (auto it = stem_cache_.find(key); it != stem_cache_.end()) return it->second;

  const std::uint64_t id = next_id_++;
  const std::string audio_path = scratch_dir_ + "/req-" + std::to_string(id) + ".wav";
  WriteWav(mixture, audio_path, WavFormat::kFloat32);
  process_->Send(
      {{"type", "separate"}, {"id", id}, {"audio_path", audio_path}, {"label", label}});
  const json response = process_->Receive();
  std::error_code ec;
  fs::remove(audio_path, ec);
  CheckResponse(response, "stem", id);

  if (!response.contains("stem_path") || !response["stem_path"].is_string()) {
    throw Error(ErrorCode::kProtocol, "stem response without stem_path");
  }
  const std::string stem_path = response["stem_path"].get<std::string>();
  if (!fs::path(stem_path).is_absolute()) {
    throw Error(ErrorCode::kProtocol, "stem_path must be absolute: " + stem_path);
  }
  AudioClip stem = ReadWav(stem_path);
  if (fs::path(stem_path).parent_path() == fs::path(scratch_dir_)) fs::remove(stem_path, ec);
  if (stem.frame_count() != mixture.frame_count() ||
      stem.sample_rate() != mixture.sample_rate()) {
    throw Error(ErrorCode::kValidation,
                "stem for '" + label + "' has " + std::to_string(stem.frame_count()) +
                    " frames @ " + std::to_string(stem.sample_rate()) + " Hz, expected " +
                    std::to_string(mixture.frame_count()) + " frames @ " +
                    std::to_string(mixture.sample_rate()) + " Hz");
  }
  stem_cache_.emplace(key, stem);
  return stem;
}

}  // namespace s5kit
