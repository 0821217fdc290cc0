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

#include "s5kit/metrics.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "s5kit/error.h"

namespace s5kit {
namespace {

void RequireAligned(const AudioClip& a, const AudioClip& b, const std::string& what) {
  if (a.frame_count() != b.frame_count() || a.sample_rate() != b.sample_rate()) {
    throw Error(ErrorCode::kAlignment,
                what + ": " + std::to_string(a.frame_count()) + " frames @ " +
                    std::to_string(a.sample_rate()) + " Hz vs " +
                    std::to_string(b.frame_count()) + " frames @ " +
                    std::to_string(b.sample_rate()) + " Hz");
  }
}

}  // namespace

void ValidateLabels(const LabelSet& labels, const ClassVocabulary& vocab) {
  for (const auto& label : labels) vocab.index(label);
}

EvalCounts CountMatches(const LabelSet& pred, const LabelSet& truth,
                        const ClassVocabulary& vocab) {
  ValidateLabels(pred, vocab);
  ValidateLabels(truth, vocab);
  EvalCounts counts;
  for (const auto& label : pred) {
    if (truth.count(label)) {
      ++counts.tp;
    } else {
      ++counts.fp;
    }
  }
  counts.fn = truth.size() - counts.tp;
  return counts;
}

double FpPenalizedAccuracy(const EvalCounts& counts) {
  const std::size_t denominator = counts.tp + counts.fn + counts.fp;
  if (denominator == 0) return 1.0;
  return static_cast<double>(counts.tp) / static_cast<double>(denominator);
}

double MacroAccuracy(const LabelSet& pred, const LabelSet& truth) {
  if (truth.empty()) return pred.empty() ? 1.0 : 0.0;
  std::size_t hits = 0;
  for (const auto& label : truth) hits += pred.count(label);
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

int SetAccuracy(const LabelSet& pred, const LabelSet& truth) {
  return pred == truth ? 1 : 0;
}

double Sdr(const AudioClip& estimate, const AudioClip& reference,
           const SdrOptions& options) {
  RequireAligned(estimate, reference, "sdr");
  const auto est = estimate.channel(options.channel);
  const auto ref = reference.channel(options.channel);
  double signal = 0.0, error = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const double r = ref[i];
    const double e = r - static_cast<double>(est[i]);
    signal += r * r;
    error += e * e;
  }
  if (signal == 0.0) return -options.clamp_db;
  if (error == 0.0) return options.clamp_db;
  return std::clamp(10.0 * std::log10(signal / error), -options.clamp_db,
                    options.clamp_db);
}

CaSdriResult CaSdri(const StemMap& truth_stems, const StemMap& est_stems,
                    const AudioClip& mixture, const SdrOptions& options) {
  for (const auto& [label, stem] : truth_stems) {
    RequireAligned(stem, mixture, "reference stem '" + label + "'");
  }
  for (const auto& [label, stem] : est_stems) {
    RequireAligned(stem, mixture, "estimated stem '" + label + "'");
  }

  CaSdriResult result;
  for (const auto& [label, ref] : truth_stems) {
    auto est = est_stems.find(label);
    if (est == est_stems.end()) {
      result.per_class_db[label] = 0.0;  // missed class
      continue;
    }
    result.per_class_db[label] =
        Sdr(est->second, ref, options) - Sdr(mixture, ref, options);
  }
  for (const auto& [label, stem] : est_stems) {
    result.per_class_db.emplace(label, 0.0);  // spurious class
  }
  if (result.per_class_db.empty()) {
    throw Error(ErrorCode::kEmptyInput, "ca_sdri: nothing to evaluate");
  }
  double sum = 0.0;
  for (const auto& [label, value] : result.per_class_db) sum += value;
  result.mean_db = sum / static_cast<double>(result.per_class_db.size());
  return result;
}

ClipEval EvaluateTags(std::string clip_id, const LabelSet& pred,
                      const LabelSet& truth, const ClassVocabulary& vocab) {
  ClipEval eval;
  eval.clip_id = std::move(clip_id);
  eval.fp_penalized = FpPenalizedAccuracy(CountMatches(pred, truth, vocab));
  eval.macro_accuracy = MacroAccuracy(pred, truth);
  eval.set_accuracy = SetAccuracy(pred, truth);
  return eval;
}

CorpusSummary Summarize(const std::vector<ClipEval>& clips) {
  CorpusSummary summary;
  summary.clips = clips.size();
  if (clips.empty()) return summary;
  double sdr_sum = 0.0;
  std::size_t sdr_count = 0;
  for (const auto& clip : clips) {
    summary.set_accuracy += clip.set_accuracy;
    summary.macro_accuracy += clip.macro_accuracy;
    summary.fp_penalized += clip.fp_penalized;
    if (clip.ca_sdri) {
      sdr_sum += *clip.ca_sdri;
      ++sdr_count;
    }
  }
  const double n = static_cast<double>(clips.size());
  summary.set_accuracy /= n;
  summary.macro_accuracy /= n;
  summary.fp_penalized /= n;
  if (sdr_count > 0) summary.ca_sdri = sdr_sum / static_cast<double>(sdr_count);
  return summary;
}

}  // namespace s5kit
