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

#ifndef S5KIT_AGENT_H_
#define S5KIT_AGENT_H_

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "s5kit/audio.h"
#include "s5kit/backends.h"
#include "s5kit/metrics.h"

namespace s5kit {

enum class RankBy { kRetagScore, kOriginalScore };
enum class EmptyFallback { kOriginalTop1, kOriginalTopK };

struct AgentConfig {
  double threshold = 0.5;  // extra candidates need a score strictly above this
  std::size_t top_k = 3;
  RankBy rank_by = RankBy::kRetagScore;
  EmptyFallback empty_fallback = EmptyFallback::kOriginalTop1;
  // Reuse the stem separated during verification instead of separating the
  // final labels again.
  bool reuse_verification_stems = false;

  void Validate() const;
};

RankBy ParseRankBy(const std::string& name);
EmptyFallback ParseEmptyFallback(const std::string& name);
std::string RankByName(RankBy rank_by);
std::string EmptyFallbackName(EmptyFallback fallback);

struct ScoredLabel {
  std::string label;
  double score = 0.0;

  friend bool operator==(const ScoredLabel&, const ScoredLabel&) = default;
};

// The top_k classes plus every class scoring above the threshold, by
// descending score with ties in vocabulary order.
std::vector<ScoredLabel> CandidateLabels(const LabelScores& scores,
                                         const AgentConfig& config);

// The tag set a thresholded top-k tagger reports without correction: classes
// above the threshold, at most top_k of them, or the single best class when
// none clears the threshold.
LabelSet BaselinePrediction(const LabelScores& scores, const AgentConfig& config);

struct Verification {
  std::string label;
  std::optional<std::string> retag_label;  // nullopt: flat re-tag response
  double retag_score = 0.0;                // re-tag score of `label` itself
  bool kept = false;
  AudioClip stem;

  friend bool operator==(const Verification&, const Verification&) = default;
};

// Separates `label` from the mixture, re-tags the stem and keeps the label iff
// the re-tag's top class is the label itself. Backend errors are rethrown as
// kBackend with the label attached.
Verification VerifyLabel(const AudioClip& mixture, const std::string& label,
                         const Tagger& tagger, const Separator& separator);

struct AgentTrace {
  LabelScores original_scores;
  std::vector<ScoredLabel> candidates{};
  std::vector<Verification> verifications{};  // candidate order
  std::vector<std::string> final_labels{};     // ranked
  StemMap final_stems{};
  bool fallback_fired = false;

  LabelSet FinalSet() const { return {final_labels.begin(), final_labels.end()}; }
  friend bool operator==(const AgentTrace&, const AgentTrace&) = default;
};

// One pass of label correction: tag the mixture, expand candidates, verify
// each by separation + re-tagging, rank the survivors, keep at most top_k and
// separate the final labels again.
AgentTrace AgentCorrect(const AudioClip& mixture, const Tagger& tagger,
                        const Separator& separator, const AgentConfig& config = {});

// Audit record of a trace (stems are omitted; only their RMS is kept).
nlohmann::json TraceToJson(const std::string& clip_id, const AgentTrace& trace);

}  // namespace s5kit

#endif  // S5KIT_AGENT_H_
