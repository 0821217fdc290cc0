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

#include <filesystem>
#include <iostream>

#include "cli_common.h"
#include "s5kit/file_util.h"
#include "s5kit/report.h"

namespace s5kit::cli {

namespace fs = std::filesystem;

int RunEvaluate(const GlobalOptions& global, const EvaluateOptions& options) {
  const ClassVocabulary vocab = LoadVocabulary(global);
  const auto manifests = ReadManifest(options.manifest, vocab);
  const auto predictions = ReadPredictions(options.predictions, vocab);

  CorpusEvalOptions eval;
  eval.corpus_root = options.corpus.empty()
                         ? fs::path(options.manifest).parent_path().string()
                         : options.corpus;
  if (eval.corpus_root.empty()) eval.corpus_root = ".";
  eval.est_root = options.est_root;
  eval.sdr.clamp_db = options.sdr_clamp;
  eval.sdr.channel = options.channel;

  const CorpusEvalResult result = EvaluateCorpus(manifests, predictions, vocab, eval);
  for (const auto& w : result.warnings) Warn(w);

  const std::string jsonl = FormatReportJsonl(result.clips, result.summary);
  if (!options.out.empty()) {
    WriteFileAtomic(options.out, jsonl);
    EchoConfig(global, fs::path(options.out).parent_path().string());
  }
  std::vector<nlohmann::json> records;
  for (const auto& c : result.clips) records.push_back(ClipEvalToJson(c));
  records.push_back(SummaryToJson(result.summary));
  std::cout << FormatReportTable(records);
  return kExitOk;
}

}  // namespace s5kit::cli
