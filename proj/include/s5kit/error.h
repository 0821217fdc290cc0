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

#ifndef S5KIT_ERROR_H_
#define S5KIT_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace s5kit {

// Failure categories. Callers branch on these (the CLI maps them to exit
// codes), so each distinct failure mode the toolkit reports gets its own value.
enum class ErrorCode {
  kInvalidArgument,
  kUnreadableFile,
  kUnwritableFile,
  kUnsupportedCodec,
  kTruncatedData,
  kParse,
  kValidation,
  kAlignment,
  kUnknownClip,
  kEmptyInput,
  kInsufficientPool,
  kBackendSpawn,
  kProtocol,
  kTimeout,
  kBackend,
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace s5kit

#endif  // S5KIT_ERROR_H_
