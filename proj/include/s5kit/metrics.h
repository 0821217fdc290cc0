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

#ifndef S5KIT_METRICS_H_
#define S5KIT_METRICS_H_

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "s5kit/audio.h"
#include "s5kit/vocabulary.h"

namespace s5kit {

using LabelSet = std::set<std::string>;
using StemMap = std::map<std::string, AudioClip>;

// Throws kValidation naming the first label missing from `vocab`.
void ValidateLabels(const LabelSet& labels, const ClassVocabulary& vocab);

struct EvalCounts {
  std::size_t tp = 0;
  std::size_t fn = 0;
  std::size_t fp = 0;

  friend bool operator==(const EvalCounts&, const EvalCounts&) = default;
};

// tp = |pred n truth|, fn = |truth \ pred|, fp = |pred \ truth|. Both sets are
// validated against `vocab`.
EvalCounts CountMatches(const LabelSet& pred, const LabelSet& truth,
                        const ClassVocabulary& vocab);

// TP / (TP + FN + FP): the fraction of the union of predicted and true labels
// that was predicted correctly. 1.0 when both sets are empty.
double FpPenalizedAccuracy(const EvalCounts& counts);

// |pred n truth| / |truth|. An empty truth set scores 1.0 if the prediction is
// also empty and 0.0 otherwise.
double MacroAccuracy(const LabelSet& pred, const LabelSet& truth);

// 1 iff pred == truth.
int SetAccuracy(const LabelSet& pred, const LabelSet& truth);

struct SdrOptions {
  double clamp_db = 100.0;
  int channel = 0;
};

// 10 log10(|ref|^2 / |ref - est|^2), clamped to [-clamp_db, clamp_db]. A
// silent reference scores -clamp_db. Throws kAlignment on length or rate
// mismatch.
double Sdr(const AudioClip& estimate, const AudioClip& reference,
           const SdrOptions& options = {});

struct CaSdriResult {
  double mean_db = 0.0;
  std::map<std::string, double> per_class_db;
};

// Class-aware SDR improvement. For every class in the union of the truth and
// estimate keys, a class present on both sides contributes
// Sdr(est, truth) - Sdr(mixture, truth); a missed or spurious class
// contributes 0. The result is the mean over the union.
//
// Throws kEmptyInput when the union is empty and kAlignment when any stem
// disagrees with the mixture in length or rate.
CaSdriResult CaSdri(const StemMap& truth_stems, const StemMap& est_stems,
                    const AudioClip& mixture, const SdrOptions& options = {});

struct ClipEval {
  std::string clip_id;
  int set_accuracy = 0;
  double macro_accuracy = 0.0;
  double fp_penalized = 0.0;
  std::optional<double> ca_sdri;
  std::map<std::string, double> per_class_sdri;
};

ClipEval EvaluateTags(std::string clip_id, const LabelSet& pred,
                      const LabelSet& truth, const ClassVocabulary& vocab);

// Per-clip arithmetic means over a corpus.
struct CorpusSummary {
  std::size_t clips = 0;
  double set_accuracy = 0.0;
  double macro_accuracy = 0.0;
  double fp_penalized = 0.0;
  std::optional<double> ca_sdri;  // mean over clips that carry a CA-SDRi
};

CorpusSummary Summarize(const std::vector<ClipEval>& clips);

}  // namespace s5kit

#endif  // S5KIT_METRICS_H_
