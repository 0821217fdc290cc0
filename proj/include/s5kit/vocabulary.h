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

#ifndef S5KIT_VOCABULARY_H_
#define S5KIT_VOCABULARY_H_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace s5kit {

// Ordered list of unique class names with a stable index <-> name mapping.
class ClassVocabulary {
 public:
  // Throws kInvalidArgument on empty or duplicate labels.
  explicit ClassVocabulary(std::vector<std::string> labels);

  // The 18 sound event classes of the challenge, in training-table order.
  static const ClassVocabulary& Default();

  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& name(std::size_t index) const { return labels_.at(index); }

  bool contains(std::string_view label) const;
  std::optional<std::size_t> find(std::string_view label) const;
  // Throws kValidation naming the label when it is not in the vocabulary.
  std::size_t index(std::string_view label) const;

  friend bool operator==(const ClassVocabulary& a, const ClassVocabulary& b) {
    return a.labels_ == b.labels_;
  }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Reads one class name per line; blank lines and '#' comments are skipped.
ClassVocabulary ReadVocabularyFile(const std::string& path);

}  // namespace s5kit

#endif  // S5KIT_VOCABULARY_H_
