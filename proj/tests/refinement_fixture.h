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

#ifndef S5KIT_TESTS_REFINEMENT_FIXTURE_H_
#define S5KIT_TESTS_REFINEMENT_FIXTURE_H_

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "s5kit/dataset.h"

namespace s5kit::testing {

// Reference per-class counts of a refined training pool: original, removed
// as short, removed as heterogeneous, added from an external source, final.
struct RefinementRow {
  const char* label;
  std::size_t original;
  std::size_t short_removed;
  std::size_t heterogeneous_removed;
  std::size_t added;
  std::size_t reference_final;
};

inline constexpr std::array<RefinementRow, 18> kRefinementCounts = {{
    {"AlarmClock", 102, 2, 37, 0, 63},
    {"BicycleBell", 230, 10, 22, 0, 198},
    {"Blender", 141, 0, 2, 0, 139},
    {"Buzzer", 181, 0, 0, 0, 181},
    {"Clapping", 482, 195, 67, 0, 220},
    {"Cough", 443, 0, 8, 0, 435},
    {"CupboardOpenClose", 413, 32, 25, 0, 356},
    {"Dishes", 399, 99, 61, 0, 239},
    {"Doorbell", 75, 4, 24, 51, 98},
    {"FootSteps", 388, 53, 16, 0, 319},
    {"HairDryer", 25, 0, 2, 0, 21},
    {"MechanicalFans", 126, 0, 0, 0, 126},
    {"MusicalKeyboard", 503, 41, 35, 10, 437},
    {"Percussion", 2063, 858, 213, 0, 992},
    {"Pour", 93, 1, 3, 0, 89},
    {"Speech", 1211, 511, 68, 0, 632},
    {"Typing", 436, 28, 8, 0, 400},
    {"VacuumCleaner", 66, 0, 0, 0, 66},
}};

// Source records realising one row's per-column counts: short records last
// 1.0 s, everything else 3.0 s; heterogeneous and added records carry their
// audit flags.
inline std::vector<SourceRecord> RefinementRecords(const RefinementRow& row) {
  std::vector<SourceRecord> out;
  const std::string label = row.label;
  auto add = [&](double duration, bool hetero, bool added) {
    const std::string id = label + "-" + std::to_string(out.size());
    out.push_back({id, label, id + ".wav", duration, hetero, added});
  };
  for (std::size_t i = 0; i < row.short_removed; ++i) add(1.0, false, false);
  for (std::size_t i = 0; i < row.heterogeneous_removed; ++i) add(3.0, true, false);
  for (std::size_t i = row.short_removed + row.heterogeneous_removed; i < row.original; ++i) {
    add(3.0, false, false);
  }
  for (std::size_t i = 0; i < row.added; ++i) add(3.0, false, true);
  return out;
}

inline std::vector<SourceRecord> RefinementRecords() {
  std::vector<SourceRecord> all;
  for (const auto& row : kRefinementCounts) {
    auto records = RefinementRecords(row);
    all.insert(all.end(), records.begin(), records.end());
  }
  return all;
}

}  // namespace s5kit::testing

#endif  // S5KIT_TESTS_REFINEMENT_FIXTURE_H_
