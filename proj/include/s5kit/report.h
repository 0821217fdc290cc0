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

#ifndef S5KIT_REPORT_H_
#define S5KIT_REPORT_H_

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "s5kit/dataset.h"
#include "s5kit/metrics.h"
#include "s5kit/vocabulary.h"

namespace s5kit {

// Predicted tags for one clip, one JSON object per line:
//   {"clip_id": "...", "labels": ["Cough", ...]}
struct Prediction {
  std::string clip_id;
  LabelSet labels;
};

std::vector<Prediction> ReadPredictions(const std::string& path,
                                        const ClassVocabulary& vocab);
void WritePredictions(const std::vector<Prediction>& predictions, const std::string& path);

// Evaluation records: {"type":"clip", ...} per clip and one {"type":"summary"}.
nlohmann::json ClipEvalToJson(const ClipEval& eval);
nlohmann::json SummaryToJson(const CorpusSummary& summary);
std::string FormatReportJsonl(const std::vector<ClipEval>& clips,
                              const CorpusSummary& summary);
// Human-readable table rendered from the JSON records above.
std::string FormatReportTable(const std::vector<nlohmann::json>& records);

struct CorpusEvalOptions {
  std::string corpus_root;  // truth: <root>/<clip>/{mixture.wav,stems/<class>.wav}
  std::string est_root;     // estimates: <root>/<clip>/stems/<class>.wav; empty = tags only
  SdrOptions sdr;
};

struct CorpusEvalResult {
  std::vector<ClipEval> clips;  // manifest order
  CorpusSummary summary;
  std::vector<std::string> warnings;
};

// Scores predictions against manifests. Every manifest clip needs exactly one
// prediction and vice versa; otherwise throws kValidation listing every
// mismatched id. A predicted class without an estimated stem file counts as
// spurious (0 dB) and adds a warning.
CorpusEvalResult EvaluateCorpus(const std::vector<MixtureManifest>& manifests,
                                const std::vector<Prediction>& predictions,
                                const ClassVocabulary& vocab,
                                const CorpusEvalOptions& options);

}  // namespace s5kit

#endif  // S5KIT_REPORT_H_
