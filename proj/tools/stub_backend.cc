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

// Conformance stub for the external backend protocol. Speaks the line-based
// JSON protocol on stdin/stdout and can be told to misbehave in specific ways
// so the harness's error handling can be exercised.
//
//   s5kit_stub_backend [--mode MODE]
//
// Modes:
//   echo          well-formed: deterministic non-flat scores, separate returns the input
//   missing-class scores omit the last vocabulary class
//   out-of-range  the first class scores 1.5
//   wrong-length  stems are one frame short
//   bad-version   hello-ack carries version 99
//   error         every tag/separate request gets an error response
//   garbage       every tag/separate request gets a non-JSON line
//   hang          never answers tag/separate
//   crash         exits right after the handshake

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "s5kit/audio.h"
#include "s5kit/wav.h"

namespace {

using nlohmann::json;

void Send(const json& message) { std::cout << message.dump() << "\n" << std::flush; }

// Scores in [0.05, 0.95], a fixed function of the audio content; silence
// scores 0 everywhere.
json EchoScores(const s5kit::AudioClip& clip, const std::vector<std::string>& vocab) {
  json scores = json::object();
  const bool silent = clip.IsSilent();
  std::uint64_t h = s5kit::Fingerprint(clip);
  for (const auto& name : vocab) {
    h ^= h >> 33;
    h *= 0xff51afd7ed558ccdULL;
    h ^= h >> 33;
    scores[name] = silent ? 0.0 : 0.05 + 0.9 * static_cast<double>(h % 1000) / 999.0;
  }
  return scores;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conformance stub for the s5kit external backend protocol"};
  std::string mode = "echo";
  app.add_option("--mode", mode, "Behaviour")
      ->check(CLI::IsMember({"echo", "missing-class", "out-of-range", "wrong-length",
                             "bad-version", "error", "garbage", "hang", "crash"}))
      ->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  std::vector<std::string> vocab;
  std::string scratch;
  std::string line;
  std::uint64_t counter = 0;
  while (std::getline(std::cin, line)) {
    if (line.empty()) continue;
    json request;
    try {
      request = json::parse(line);
    } catch (const json::exception&) {
      Send({{"type", "error"}, {"message", "unparseable request"}});
      continue;
    }
    const std::string type = request.value("type", "");
    if (type == "shutdown") return 0;
    if (type == "hello") {
      vocab = request.value("vocabulary", std::vector<std::string>{});
      scratch = request.value("scratch_dir", "");
      Send({{"type", "hello-ack"}, {"version", mode == "bad-version" ? 99 : 1}});
      if (mode == "crash") return 1;
      continue;
    }
    const json id = request.value("id", json());
    if (mode == "hang") {
      std::this_thread::sleep_for(std::chrono::hours(1));
      return 0;
    }
    if (mode == "error") {
      Send({{"type", "error"}, {"id", id}, {"message", "stub refuses " + type}});
      continue;
    }
    if (mode == "garbage") {
      std::cout << "this is not json\n" << std::flush;
      continue;
    }
    try {
      const s5kit::AudioClip clip = s5kit::ReadWav(request.at("audio_path").get<std::string>());
      if (type == "tag") {
        json scores = EchoScores(clip, vocab);
        if (mode == "missing-class" && !vocab.empty()) scores.erase(vocab.back());
        if (mode == "out-of-range" && !vocab.empty()) scores[vocab.front()] = 1.5;
        Send({{"type", "scores"}, {"id", id}, {"scores", scores}});
      } else if (type == "separate") {
        s5kit::AudioClip stem = clip;
        if (mode == "wrong-length" && !clip.empty()) {
          std::vector<std::vector<float>> channels = clip.channels();
          for (auto& ch : channels) ch.pop_back();
          stem = s5kit::AudioClip(std::move(channels), clip.sample_rate());
        }
        const std::string path =
            (std::filesystem::path(scratch) / ("stub_stem_" + std::to_string(++counter) + ".wav"))
                .string();
        s5kit::WriteWav(stem, path);
        Send({{"type", "stem"}, {"id", id}, {"stem_path", path}});
      } else {
        Send({{"type", "error"}, {"id", id}, {"message", "unknown request type " + type}});
      }
    } catch (const std::exception& e) {
      Send({{"type", "error"}, {"id", id}, {"message", e.what()}});
    }
  }
  return 0;
}
