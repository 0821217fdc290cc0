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

#include "cli_common.h"

#include <filesystem>
#include <iostream>

#include "s5kit/file_util.h"
#include "s5kit/vocabulary.h"

namespace s5kit::cli {

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kBackendSpawn:
    case ErrorCode::kProtocol:
    case ErrorCode::kTimeout:
    case ErrorCode::kBackend:
      return kExitBackend;
    case ErrorCode::kInvalidArgument:
      return kExitUsage;
    default:
      return kExitData;
  }
}

ClassVocabulary LoadVocabulary(const GlobalOptions& global) {
  if (global.vocab_file.empty()) return ClassVocabulary::Default();
  return ReadVocabularyFile(global.vocab_file);
}

void EchoConfig(const GlobalOptions& global, const std::string& out_dir) {
  if (out_dir.empty() || global.effective_config.empty()) return;
  WriteFileAtomic((std::filesystem::path(out_dir) / "effective_config.toml").string(),
                  global.effective_config);
}

void Log(const GlobalOptions& global, int level, const std::string& message) {
  if (global.verbosity >= level) std::cerr << message << "\n";
}

void Warn(const std::string& message) { std::cerr << "warning: " << message << "\n"; }

}  // namespace s5kit::cli
