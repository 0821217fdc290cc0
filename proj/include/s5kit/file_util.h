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

#ifndef S5KIT_FILE_UTIL_H_
#define S5KIT_FILE_UTIL_H_

#include <string>
#include <string_view>

namespace s5kit {

// Writes to `<path>.tmp.<pid>` and renames over `path`, so readers never see a
// partially written file. Creates missing parent directories.
void WriteFileAtomic(const std::string& path, std::string_view contents);

std::string ReadFileToString(const std::string& path);

}  // namespace s5kit

#endif  // S5KIT_FILE_UTIL_H_
