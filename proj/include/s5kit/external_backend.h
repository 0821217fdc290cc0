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

#ifndef S5KIT_EXTERNAL_BACKEND_H_
#define S5KIT_EXTERNAL_BACKEND_H_

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>

#include "s5kit/backends.h"

namespace s5kit {

// Wire protocol spoken with external model processes over their stdin/stdout.
// One JSON object per line; requests and responses strictly alternate.
//
//   -> {"type":"hello","version":1,"vocabulary":[...],"scratch_dir":"/abs"}
//   <- {"type":"hello-ack","version":1}
//   -> {"type":"tag","id":N,"audio_path":"/abs/in.wav"}
//   <- {"type":"scores","id":N,"scores":{"<class>":s,...}}
//   -> {"type":"separate","id":N,"audio_path":"/abs/in.wav","label":"<class>"}
//   <- {"type":"stem","id":N,"stem_path":"/abs/out.wav"}
//   <- {"type":"error","id":N,"message":"..."}    (in place of any response)
//   -> {"type":"shutdown"}                         (no response)
//
// Audio travels as 32-bit float WAV files inside the scratch directory
// announced in `hello`. All paths are absolute.
inline constexpr int kProtocolVersion = 1;

struct ExternalBackendOptions {
  std::string command;  // run through /bin/sh -c
  std::chrono::milliseconds timeout{60'000};
  // Parent directory for the per-process scratch directory. Empty means
  // $S5KIT_SCRATCH_DIR, falling back to the system temp directory.
  std::string scratch_root;
};

// Proxy for one external process. Requests are serialised on an internal
// mutex; run several instances for parallelism. Responses are validated
// (complete vocabulary, scores in [0, 1], stem length and rate) and cached by
// (request kind, audio fingerprint, label) for the lifetime of the instance.
//
// Errors: kBackendSpawn (process cannot start or dies during the handshake),
// kProtocol (malformed or mismatched message, version mismatch), kValidation
// (response violates the score or stem contract), kTimeout, kBackend (the
// process answered with an error message or is no longer running).
class ExternalBackend : public Tagger, public Separator {
 public:
  ExternalBackend(ClassVocabulary vocab, ExternalBackendOptions options);
  ~ExternalBackend() override;

  ExternalBackend(const ExternalBackend&) = delete;
  ExternalBackend& operator=(const ExternalBackend&) = delete;

  const ClassVocabulary& vocabulary() const override { return vocab_; }
  LabelScores Tag(const AudioClip& clip) const override;
  AudioClip Separate(const AudioClip& mixture, const std::string& label) const override;

  const std::string& scratch_dir() const { return scratch_dir_; }

 private:
  class Process;

  ClassVocabulary vocab_;
  ExternalBackendOptions options_;
  std::string scratch_dir_;
  std::unique_ptr<Process> process_;
  mutable std::mutex mu_;
  mutable std::uint64_t next_id_ = 1;
  mutable std::map<std::pair<std::uint64_t, std::string>, LabelScores> tag_cache_;
  mutable std::map<std::pair<std::uint64_t, std::string>, AudioClip> stem_cache_;
};

}  // namespace s5kit

#endif  // S5KIT_EXTERNAL_BACKEND_H_
