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

#include "s5kit/backends.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "s5kit/error.h"

namespace s5kit {

LabelScores::LabelScores(ClassVocabulary vocab, std::vector<double> scores)
    : vocab_(std::move(vocab)), scores_(std::move(scores)) {
  if (scores_.size() != vocab_.size()) {
    throw Error(ErrorCode::kValidation,
                "expected " + std::to_string(vocab_.size()) + " class scores, got " +
                    std::to_string(scores_.size()));
  }
  for (std::size_t i = 0; i < scores_.size(); ++i) {
    const double s = scores_[i];
    if (!std::isfinite(s) || s < 0.0 || s > 1.0) {
      throw Error(ErrorCode::kValidation, "score for '" + vocab_.name(i) +
                                              "' is outside [0, 1]: " +
                                              std::to_string(s));
    }
  }
}

LabelScores LabelScores::Uniform(ClassVocabulary vocab, double value) {
  const std::size_t n = vocab.size();
  return LabelScores(std::move(vocab), std::vector<double>(n, value));
}

LabelScores LabelScores::FromMap(ClassVocabulary vocab,
                                 const std::map<std::string, double>& scores) {
  std::vector<double> values(vocab.size(), 0.0);
  for (const auto& [label, score] : scores) {
    if (!vocab.contains(label)) {
      throw Error(ErrorCode::kValidation, "score for unknown class '" + label + "'");
    }
    values[vocab.index(label)] = score;
  }
  for (const auto& label : vocab.labels()) {
    if (!scores.count(label)) {
      throw Error(ErrorCode::kValidation, "missing score for class '" + label + "'");
    }
  }
  return LabelScores(std::move(vocab), std::move(values));
}

std::optional<std::size_t> LabelScores::TopClass() const {
  const auto hi = std::max_element(scores_.begin(), scores_.end());  // first of ties
  if (*std::min_element(scores_.begin(), scores_.end()) == *hi) return std::nullopt;
  return static_cast<std::size_t>(hi - scores_.begin());
}

std::vector<std::size_t> LabelScores::Ranked() const {
  std::vector<std::size_t> order(scores_.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [this](std::size_t a, std::size_t b) {
    return scores_[a] > scores_[b];
  });
  return order;
}

OracleCorpus::OracleCorpus(std::vector<OracleClip> clips) : clips_(std::move(clips)) {
  for (std::size_t i = 0; i < clips_.size(); ++i) {
    const auto& clip = clips_[i];
    if (!by_id_.emplace(clip.clip_id, i).second) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate clip id " + clip.clip_id);
    }
    if (!clip.mixture.IsSilent()) index_.emplace(Fingerprint(clip.mixture), std::pair{i, std::string()});
  }
  // Stems are indexed after every mixture so a stem identical to its mixture
  // (single event over a silent bed) resolves as the mixture.
  for (std::size_t i = 0; i < clips_.size(); ++i) {
    for (const auto& [label, stem] : clips_[i].stems) {
      if (!stem.IsSilent()) index_.emplace(Fingerprint(stem), std::pair{i, label});
    }
  }
}

std::optional<OracleCorpus::Match> OracleCorpus::Find(const AudioClip& audio) const {
  auto it = index_.find(Fingerprint(audio));
  if (it == index_.end()) return std::nullopt;
  Match match;
  match.clip = &clips_[it->second.first];
  if (!it->second.second.empty()) match.stem_label = it->second.second;
  return match;
}

const OracleClip* OracleCorpus::FindById(const std::string& clip_id) const {
  auto it = by_id_.find(clip_id);
  return it == by_id_.end() ? nullptr : &clips_[it->second];
}

namespace {

class OracleTagger : public Tagger {
 public:
  OracleTagger(ClassVocabulary vocab, std::shared_ptr<const OracleCorpus> corpus,
               OracleTaggerOptions options)
      : vocab_(std::move(vocab)), corpus_(std::move(corpus)), options_(std::move(options)) {
    if (options_.floor < 0.0 || options_.floor > 1.0) {
      throw Error(ErrorCode::kInvalidArgument, "oracle floor must lie in [0, 1]");
    }
    for (const auto& [clip, extra] : options_.injected) {
      for (const auto& [label, score] : extra) {
        vocab_.index(label);
        if (score < 0.0 || score > 1.0) {
          throw Error(ErrorCode::kInvalidArgument, "injected score outside [0, 1]");
        }
      }
    }
    for (const auto& [from, to] : options_.stem_confusions) {
      vocab_.index(from);
      vocab_.index(to);
    }
  }

  const ClassVocabulary& vocabulary() const override { return vocab_; }

  LabelScores Tag(const AudioClip& clip) const override {
    std::vector<double> scores(vocab_.size(), options_.floor);
    if (clip.IsSilent()) return Finish(std::move(scores), clip);

    const auto match = corpus_->Find(clip);
    if (!match) {
      throw Error(ErrorCode::kUnknownClip,
                  "oracle tagger: audio matches no known mixture or stem");
    }
    if (match->stem_label) {
      std::string label = *match->stem_label;
      if (auto it = options_.stem_confusions.find(label);
          it != options_.stem_confusions.end()) {
        label = it->second;
      }
      scores[vocab_.index(label)] = 1.0;
    } else {
      for (const auto& [label, stem] : match->clip->stems) {
        scores[vocab_.index(label)] = 1.0;
      }
      if (auto it = options_.injected.find(match->clip->clip_id);
          it != options_.injected.end()) {
        for (const auto& [label, score] : it->second) {
          double& slot = scores[vocab_.index(label)];
          slot = std::max(slot, score);
        }
      }
    }
    return Finish(std::move(scores), clip);
  }

 private:
  LabelScores Finish(std::vector<double> scores, const AudioClip& clip) const {
    if (options_.noise_sigma > 0.0) {
      std::mt19937_64 rng(options_.noise_seed ^ Fingerprint(clip));
      std::normal_distribution<double> noise(0.0, options_.noise_sigma);
      for (double& s : scores) s = std::clamp(s + noise(rng), 0.0, 1.0);
    }
    return LabelScores(vocab_, std::move(scores));
  }

  ClassVocabulary vocab_;
  std::shared_ptr<const OracleCorpus> corpus_;
  OracleTaggerOptions options_;
};

class OracleSeparator : public Separator {
 public:
  OracleSeparator(std::shared_ptr<const OracleCorpus> corpus, SeparatorFallback fallback)
      : corpus_(std::move(corpus)), fallback_(fallback) {}

  AudioClip Separate(const AudioClip& mixture, const std::string& label) const override {
    const auto match = corpus_->Find(mixture);
    if (!match || match->stem_label) {
      throw Error(ErrorCode::kUnknownClip,
                  "oracle separator: audio matches no known mixture");
    }
    if (auto it = match->clip->stems.find(label); it != match->clip->stems.end()) {
      return it->second;
    }
    if (fallback_ == SeparatorFallback::kMixture) return mixture;
    return AudioClip::Silence(mixture.frame_count(), mixture.sample_rate(),
                              mixture.channel_count());
  }

 private:
  std::shared_ptr<const OracleCorpus> corpus_;
  SeparatorFallback fallback_;
};

}  // namespace

std::unique_ptr<Tagger> MakeOracleTagger(ClassVocabulary vocab,
                                         std::shared_ptr<const OracleCorpus> corpus,
                                         OracleTaggerOptions options) {
  return std::make_unique<OracleTagger>(std::move(vocab), std::move(corpus),
                                        std::move(options));
}

std::unique_ptr<Separator> MakeOracleSeparator(std::shared_ptr<const OracleCorpus> corpus,
                                               SeparatorFallback fallback) {
  return std::make_unique<OracleSeparator>(std::move(corpus), fallback);
}

TemplateTagger::TemplateTagger(ClassVocabulary vocab,
                               const std::vector<std::pair<AudioClip, std::string>>& training,
                               TemplateTaggerOptions options)
    : vocab_(std::move(vocab)), options_(std::move(options)) {
  if (training.empty()) {
    throw Error(ErrorCode::kEmptyInput, "template tagger needs training examples");
  }
  // Summaries are sorted before any accumulation so the fitted model does not
  // depend on the order of the training list, bit for bit.
  std::vector<std::pair<std::size_t, std::vector<double>>> summaries;
  summaries.reserve(training.size());
  for (const auto& [clip, label] : training) {
    summaries.emplace_back(vocab_.index(label), FeatureSummary(clip, options_.features));
  }
  std::sort(summaries.begin(), summaries.end());

  const std::size_t dims = summaries.front().second.size();
  const double n = static_cast<double>(summaries.size());
  mean_.assign(dims, 0.0);
  scale_.assign(dims, 0.0);
  for (const auto& [label, s] : summaries) {
    for (std::size_t d = 0; d < dims; ++d) mean_[d] += s[d];
  }
  for (double& m : mean_) m /= n;
  for (const auto& [label, s] : summaries) {
    for (std::size_t d = 0; d < dims; ++d) scale_[d] += (s[d] - mean_[d]) * (s[d] - mean_[d]);
  }
  for (double& v : scale_) {
    v = std::sqrt(v / n);
    if (!(v > 1e-12)) v = 1.0;
  }

  std::vector<std::vector<double>> sums(vocab_.size(), std::vector<double>(dims, 0.0));
  std::vector<std::size_t> counts(vocab_.size(), 0);
  for (const auto& [label, s] : summaries) {
    ++counts[label];
    for (std::size_t d = 0; d < dims; ++d) sums[label][d] += (s[d] - mean_[d]) / scale_[d];
  }
  templates_.resize(vocab_.size());
  for (std::size_t c = 0; c < vocab_.size(); ++c) {
    if (counts[c] == 0) continue;
    for (double& v : sums[c]) v /= static_cast<double>(counts[c]);
    templates_[c] = std::move(sums[c]);
  }
  tau_ = options_.tau > 0.0 ? options_.tau : static_cast<double>(dims);
}

std::vector<double> TemplateTagger::TemplateDistances(const AudioClip& clip) const {
  const std::vector<double> summary = FeatureSummary(clip, options_.features);
  std::vector<double> z(summary.size());
  for (std::size_t d = 0; d < summary.size(); ++d) z[d] = (summary[d] - mean_[d]) / scale_[d];
  std::vector<double> distances(vocab_.size(), std::numeric_limits<double>::infinity());
  for (std::size_t c = 0; c < vocab_.size(); ++c) {
    if (!templates_[c]) continue;
    double acc = 0.0;
    for (std::size_t d = 0; d < z.size(); ++d) {
      const double diff = z[d] - (*templates_[c])[d];
      acc += diff * diff;
    }
    distances[c] = acc;
  }
  return distances;
}

LabelScores TemplateTagger::Tag(const AudioClip& clip) const {
  if (clip.IsSilent()) return LabelScores::Uniform(vocab_, 0.0);
  const std::vector<double> distances = TemplateDistances(clip);
  std::vector<double> scores(vocab_.size(), 0.0);
  for (std::size_t c = 0; c < vocab_.size(); ++c) {
    if (std::isfinite(distances[c])) scores[c] = std::exp(-distances[c] / tau_);
  }
  return LabelScores(vocab_, std::move(scores));
}

LabelScores EnsembleScores(std::span<const LabelScores> per_member,
                           std::span<const double> weights) {
  if (per_member.empty() || per_member.size() != weights.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "ensemble needs one weight per member (" +
                    std::to_string(per_member.size()) + " members, " +
                    std::to_string(weights.size()) + " weights)");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) {
      throw Error(ErrorCode::kInvalidArgument, "ensemble weights must be finite and >= 0");
    }
    total += w;
  }
  if (total <= 0.0) throw Error(ErrorCode::kInvalidArgument, "ensemble weights sum to 0");

  const ClassVocabulary& vocab = per_member.front().vocabulary();
  std::vector<double> combined(vocab.size(), 0.0);
  for (std::size_t m = 0; m < per_member.size(); ++m) {
    if (!(per_member[m].vocabulary() == vocab)) {
      throw Error(ErrorCode::kInvalidArgument, "ensemble members disagree on vocabulary");
    }
    const double w = weights[m] / total;
    const auto values = per_member[m].values();
    for (std::size_t c = 0; c < combined.size(); ++c) combined[c] += w * values[c];
  }
  for (double& v : combined) v = std::clamp(v, 0.0, 1.0);
  return LabelScores(vocab, std::move(combined));
}

EnsembleTagger::EnsembleTagger(EnsembleConfig config) : config_(std::move(config)) {
  if (config_.members.empty() || config_.members.size() != config_.weights.size()) {
    throw Error(ErrorCode::kInvalidArgument, "ensemble needs one weight per member");
  }
  for (const auto& member : config_.members) {
    if (!member) throw Error(ErrorCode::kInvalidArgument, "null ensemble member");
    if (!(member->vocabulary() == config_.members.front()->vocabulary())) {
      throw Error(ErrorCode::kInvalidArgument, "ensemble members disagree on vocabulary");
    }
  }
}

const ClassVocabulary& EnsembleTagger::vocabulary() const {
  return config_.members.front()->vocabulary();
}

LabelScores EnsembleTagger::Tag(const AudioClip& clip) const {
  std::vector<LabelScores> outputs;
  outputs.reserve(config_.members.size());
  for (const auto& member : config_.members) outputs.push_back(member->Tag(clip));
  return EnsembleScores(outputs, config_.weights);
}

}  // namespace s5kit
