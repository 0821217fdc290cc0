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

#include "s5kit/agent.h"

#include <algorithm>
#include <cmath>

#include "s5kit/error.h"

namespace s5kit {

void AgentConfig::Validate() const {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "threshold must lie in [0, 1], got " + std::to_string(threshold));
  }
  if (top_k < 1) throw Error(ErrorCode::kInvalidArgument, "top_k must be at least 1");
}

RankBy ParseRankBy(const std::string& name) {
  if (name == "retag_score") return RankBy::kRetagScore;
  if (name == "original_score") return RankBy::kOriginalScore;
  throw Error(ErrorCode::kInvalidArgument,
              "rank-by must be retag_score or original_score, got '" + name + "'");
}

EmptyFallback ParseEmptyFallback(const std::string& name) {
  if (name == "original_top1") return EmptyFallback::kOriginalTop1;
  if (name == "original_topk") return EmptyFallback::kOriginalTopK;
  throw Error(ErrorCode::kInvalidArgument,
              "empty fallback must be original_top1 or original_topk, got '" + name + "'");
}

std::string RankByName(RankBy rank_by) {
  return rank_by == RankBy::kRetagScore ? "retag_score" : "original_score";
}

std::string EmptyFallbackName(EmptyFallback fallback) {
  return fallback == EmptyFallback::kOriginalTop1 ? "original_top1" : "original_topk";
}

std::vector<ScoredLabel> CandidateLabels(const LabelScores& scores,
                                         const AgentConfig& config) {
  config.Validate();
  const auto& vocab = scores.vocabulary();
  std::vector<ScoredLabel> out;
  const auto ranked = scores.Ranked();
  for (std::size_t rank = 0; rank < ranked.size(); ++rank) {
    const std::size_t c = ranked[rank];
    if (rank < config.top_k || scores.at(c) > config.threshold) {
      out.push_back({vocab.name(c), scores.at(c)});
    }
  }
  return out;
}

LabelSet BaselinePrediction(const LabelScores& scores, const AgentConfig& config) {
  config.Validate();
  LabelSet out;
  const auto ranked = scores.Ranked();
  for (std::size_t c : ranked) {
    if (out.size() >= config.top_k || !(scores.at(c) > config.threshold)) break;
    out.insert(scores.vocabulary().name(c));
  }
  if (out.empty()) out.insert(scores.vocabulary().name(ranked.front()));
  return out;
}

Verification VerifyLabel(const AudioClip& mixture, const std::string& label,
                         const Tagger& tagger, const Separator& separator) {
  Verification v;
  v.label = label;
  try {
    v.stem = separator.Separate(mixture, label);
    const LabelScores retag = tagger.Tag(v.stem);
    v.retag_score = retag[label];
    if (const auto top = retag.TopClass()) v.retag_label = retag.vocabulary().name(*top);
  } catch (const Error& e) {
    throw Error(ErrorCode::kBackend, "verifying '" + label + "': " + e.what());
  }
  v.kept = v.retag_label.has_value() && *v.retag_label == label;
  return v;
}

AgentTrace AgentCorrect(const AudioClip& mixture, const Tagger& tagger,
                        const Separator& separator, const AgentConfig& config) {
  config.Validate();
  AgentTrace trace{.original_scores = tagger.Tag(mixture)};
  const auto& vocab = trace.original_scores.vocabulary();
  trace.candidates = CandidateLabels(trace.original_scores, config);

  struct Survivor {
    std::size_t candidate;
    double key;
  };
  std::vector<Survivor> survivors;
  for (std::size_t i = 0; i < trace.candidates.size(); ++i) {
    trace.verifications.push_back(
        VerifyLabel(mixture, trace.candidates[i].label, tagger, separator));
    const Verification& v = trace.verifications.back();
    if (!v.kept) continue;
    survivors.push_back({i, config.rank_by == RankBy::kRetagScore
                                ? v.retag_score
                                : trace.candidates[i].score});
  }
  std::stable_sort(survivors.begin(), survivors.end(),
                   [&](const Survivor& a, const Survivor& b) {
                     if (a.key != b.key) return a.key > b.key;
                     return vocab.index(trace.candidates[a.candidate].label) <
                            vocab.index(trace.candidates[b.candidate].label);
                   });

  std::vector<std::size_t> chosen;  // candidate indices
  for (const auto& s : survivors) {
    if (chosen.size() >= config.top_k) break;
    chosen.push_back(s.candidate);
  }
  if (chosen.empty()) {
    trace.fallback_fired = true;
    // Candidates are already in original-score order.
    const std::size_t n = config.empty_fallback == EmptyFallback::kOriginalTop1
                              ? 1
                              : std::min(config.top_k, trace.candidates.size());
    for (std::size_t i = 0; i < n; ++i) chosen.push_back(i);
  }

  for (std::size_t i : chosen) {
    const std::string& label = trace.candidates[i].label;
    trace.final_labels.push_back(label);
    if (config.reuse_verification_stems) {
      trace.final_stems.emplace(label, trace.verifications[i].stem);
      continue;
    }
    try {
      trace.final_stems.emplace(label, separator.Separate(mixture, label));
    } catch (const Error& e) {
      throw Error(ErrorCode::kBackend, "separating '" + label + "': " + e.what());
    }
  }
  return trace;
}

nlohmann::json TraceToJson(const std::string& clip_id, const AgentTrace& trace) {
  using nlohmann::json;
  json original = json::object();
  const auto& vocab = trace.original_scores.vocabulary();
  for (std::size_t c = 0; c < vocab.size(); ++c) {
    original[vocab.name(c)] = trace.original_scores.at(c);
  }
  json candidates = json::array();
  for (const auto& c : trace.candidates) {
    candidates.push_back({{"label", c.label}, {"score", c.score}});
  }
  json verifications = json::array();
  for (const auto& v : trace.verifications) {
    verifications.push_back({{"label", v.label},
                             {"retag_label", v.retag_label ? json(*v.retag_label) : json()},
                             {"retag_score", v.retag_score},
                             {"kept", v.kept},
                             {"stem_rms", Rms(v.stem, 0)}});
  }
  json stems = json::object();
  for (const auto& [label, stem] : trace.final_stems) stems[label] = {{"rms", Rms(stem, 0)}};
  return {{"type", "agent_trace"},
          {"clip_id", clip_id},
          {"original_scores", original},
          {"candidates", candidates},
          {"verifications", verifications},
          {"final_labels", trace.final_labels},
          {"final_stems", stems},
          {"fallback_fired", trace.fallback_fired}};
}

}  // namespace s5kit
