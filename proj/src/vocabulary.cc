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

#include "s5kit/vocabulary.h"

#include <fstream>
#include <utility>

#include "s5kit/error.h"

namespace s5kit {

ClassVocabulary::ClassVocabulary(std::vector<std::string> labels)
    : labels_(std::move(labels)) {
  if (labels_.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "vocabulary is empty");
  }
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i].empty()) {
      throw Error(ErrorCode::kInvalidArgument, "empty class name in vocabulary");
    }
    if (!index_.emplace(labels_[i], i).second) {
      throw Error(ErrorCode::kInvalidArgument,
                  "duplicate class '" + labels_[i] + "' in vocabulary");
    }
  }
}

const ClassVocabulary& ClassVocabulary::Default() {
  static const ClassVocabulary kDefault({
      "AlarmClock", "BicycleBell", "Blender", "Buzzer", "Clapping", "Cough",
      "CupboardOpenClose", "Dishes", "Doorbell", "FootSteps", "HairDryer",
      "MechanicalFans", "MusicalKeyboard", "Percussion", "Pour", "Speech",
      "Typing", "VacuumCleaner",
  });
  return kDefault;
}

bool ClassVocabulary::contains(std::string_view label) const {
  return find(label).has_value();
}

std::optional<std::size_t> ClassVocabulary::find(std::string_view label) const {
  auto it = index_.find(std::string(label));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t ClassVocabulary::index(std::string_view label) const {
  auto found = find(label);
  if (!found) {
    throw Error(ErrorCode::kValidation,
                "label '" + std::string(label) + "' is not in the vocabulary");
  }
  return *found;
}

ClassVocabulary ReadVocabularyFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kUnreadableFile, "cannot open vocabulary " + path);
  }
  std::vector<std::string> labels;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t\r");
    labels.push_back(line.substr(first, last - first + 1));
  }
  return ClassVocabulary(std::move(labels));
}

}  // namespace s5kit
