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

#ifndef S5KIT_BACKENDS_H_
#define S5KIT_BACKENDS_H_

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "s5kit/audio.h"
#include "s5kit/features.h"
#include "s5kit/metrics.h"
#include "s5kit/vocabulary.h"

namespace s5kit {

// Per-class sigmoid-style scores, complete over a vocabulary, each in [0, 1].
class LabelScores {
 public:
  // Throws kValidation if the size does not match the vocabulary or a score
  // is non-finite or outside [0, 1].
  LabelScores(ClassVocabulary vocab, std::vector<double> scores);
  static LabelScores Uniform(ClassVocabulary vocab, double value);
  // Throws kValidation naming the first missing or unknown class.
  static LabelScores FromMap(ClassVocabulary vocab,
                             const std::map<std::string, double>& scores);

  const ClassVocabulary& vocabulary() const { return vocab_; }
  std::span<const double> values() const { return scores_; }
  double at(std::size_t index) const { return scores_.at(index); }
  double operator[](std::string_view label) const {
    return scores_[vocab_.index(label)];
  }

  // Highest-scoring class, ties broken by vocabulary order. nullopt when every
  // class scores the same, i.e. the response carries no preference (silence).
  std::optional<std::size_t> TopClass() const;

  // Class indices by descending score, ties by vocabulary order.
  std::vector<std::size_t> Ranked() const;

  friend bool operator==(const LabelScores&, const LabelScores&) = default;

 private:
  ClassVocabulary vocab_;
  std::vector<double> scores_;
};

// Audio tagger (the M2D-AT role). Implementations must be deterministic for a
// fixed instance and input and safe to call from several threads.
class Tagger {
 public:
  virtual ~Tagger() = default;
  virtual const ClassVocabulary& vocabulary() const = 0;
  virtual LabelScores Tag(const AudioClip& clip) const = 0;
};

// Label-queried separator (the ResUNetK role). Output has the length and rate
// of the input.
class Separator {
 public:
  virtual ~Separator() = default;
  virtual AudioClip Separate(const AudioClip& mixture,
                             const std::string& label) const = 0;
};

// Ground truth for one mixture, as the oracle backends see it.
struct OracleClip {
  std::string clip_id;
  AudioClip mixture;
  StemMap stems;  // one per true class
};

// Fingerprint index over a set of oracle clips: any mixture or stem audio
// handed to an oracle backend is matched back to its clip.
class OracleCorpus {
 public:
  explicit OracleCorpus(std::vector<OracleClip> clips);

  struct Match {
    const OracleClip* clip = nullptr;
    std::optional<std::string> stem_label;  // set when the audio is a stem
  };
  std::optional<Match> Find(const AudioClip& audio) const;
  const OracleClip* FindById(const std::string& clip_id) const;
  const std::vector<OracleClip>& clips() const { return clips_; }

 private:
  std::vector<OracleClip> clips_;
  std::unordered_map<std::uint64_t, std::pair<std::size_t, std::string>> index_;
  std::unordered_map<std::string, std::size_t> by_id_;
};

struct OracleTaggerOptions {
  double floor = 0.0;        // score of every class not known to be present
  double noise_sigma = 0.0;  // Gaussian score noise, seeded per input
  std::uint64_t noise_seed = 0;
  // clip id -> {class -> score} added when tagging that clip's mixture.
  std::map<std::string, std::map<std::string, double>> injected;
  // Stems of class `first` are tagged as class `second` (corrupted re-tagger).
  std::map<std::string, std::string> stem_confusions;
};

// Scores 1.0 for the true classes of a mixture (or the class of a stem) and
// `floor` elsewhere. Silent input scores `floor` everywhere. Any other audio
// throws kUnknownClip.
std::unique_ptr<Tagger> MakeOracleTagger(ClassVocabulary vocab,
                                         std::shared_ptr<const OracleCorpus> corpus,
                                         OracleTaggerOptions options = {});

enum class SeparatorFallback { kSilence, kMixture };

// Returns the true stem for a true class, and silence or the mixture itself
// for any other class. Unknown mixtures throw kUnknownClip.
std::unique_ptr<Separator> MakeOracleSeparator(
    std::shared_ptr<const OracleCorpus> corpus,
    SeparatorFallback fallback = SeparatorFallback::kSilence);

struct TemplateTaggerOptions {
  FeatureBundleConfig features;
  double tau = 0.0;  // <= 0 means the summary dimension
};

// Nearest-template tagger over feature summaries. Summaries are z-scored with
// statistics fit on the training set; class c scores exp(-d_c^2 / tau) where
// d_c is the distance to the mean summary of class c. Classes with no
// training examples score 0, and so does every class for silent input.
class TemplateTagger : public Tagger {
 public:
  // Throws kEmptyInput on an empty training set and kValidation on labels
  // outside the vocabulary.
  TemplateTagger(ClassVocabulary vocab,
                 const std::vector<std::pair<AudioClip, std::string>>& training,
                 TemplateTaggerOptions options = {});

  const ClassVocabulary& vocabulary() const override { return vocab_; }
  LabelScores Tag(const AudioClip& clip) const override;

  // Squared distances in z-scored space, for inspection and tests.
  std::vector<double> TemplateDistances(const AudioClip& clip) const;

 private:
  ClassVocabulary vocab_;
  TemplateTaggerOptions options_;
  std::vector<double> mean_;
  std::vector<double> scale_;
  std::vector<std::optional<std::vector<double>>> templates_;
  double tau_ = 1.0;
};

// Weights for the four-member feature ensemble, in member order: roll-off +
// chroma, chroma, roll-off, retrained baseline.
inline constexpr std::array<double, 4> kDefaultEnsembleWeights = {0.35, 0.30, 0.20,
                                                                  0.15};

struct EnsembleConfig {
  std::vector<std::shared_ptr<const Tagger>> members;
  std::vector<double> weights;
};

// Per class, the weighted arithmetic mean of the member scores with weights
// normalised to sum to 1. Throws kInvalidArgument on a length mismatch,
// negative or non-finite weights, a zero weight sum, or mixed vocabularies.
LabelScores EnsembleScores(std::span<const LabelScores> per_member,
                           std::span<const double> weights);

class EnsembleTagger : public Tagger {
 public:
  explicit EnsembleTagger(EnsembleConfig config);

  const ClassVocabulary& vocabulary() const override;
  LabelScores Tag(const AudioClip& clip) const override;

 private:
  EnsembleConfig config_;
};

}  // namespace s5kit

#endif  // S5KIT_BACKENDS_H_
