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

#ifndef S5KIT_DATASET_H_
#define S5KIT_DATASET_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "s5kit/audio.h"
#include "s5kit/metrics.h"
#include "s5kit/vocabulary.h"

namespace s5kit {

// One isolated sound event in the source pool. The two flags are inputs from
// a manual audit, never computed here.
struct SourceRecord {
  std::string id;
  std::string label;
  std::string path;
  double duration = 0.0;  // seconds
  bool heterogeneous = false;
  bool added_external = false;
};

inline constexpr double kDefaultMinDuration = 1.5;

struct PartitionResult {
  std::vector<SourceRecord> kept;
  std::vector<SourceRecord> removed;
};

// Keeps records with duration >= min_duration (only strictly shorter ones are
// removed). Order is preserved in both halves.
PartitionResult FilterShort(const std::vector<SourceRecord>& records,
                            double min_duration = kDefaultMinDuration);

struct ClassAudit {
  std::string label;
  std::size_t original = 0;
  std::size_t short_removed = 0;
  std::size_t heterogeneous_removed = 0;
  std::size_t added = 0;
  std::size_t final_count = 0;

  friend bool operator==(const ClassAudit&, const ClassAudit&) = default;
};

// Audits the records of one class. Externally added records count only as
// `added`; every other record counts toward `original` and is removed as
// short first, otherwise as heterogeneous. final = original - short -
// heterogeneous + added. Throws kInvalidArgument on mixed classes.
ClassAudit AuditClass(const std::vector<SourceRecord>& records,
                      double min_duration = kDefaultMinDuration);

// One audit row per vocabulary class, in vocabulary order. Throws kValidation
// for records whose class is outside the vocabulary.
std::vector<ClassAudit> AuditCorpus(const std::vector<SourceRecord>& records,
                                    const ClassVocabulary& vocab,
                                    double min_duration = kDefaultMinDuration);

// Records that survive refinement: not short, not heterogeneous, plus every
// added record.
std::vector<SourceRecord> RefinedPool(const std::vector<SourceRecord>& records,
                                      double min_duration = kDefaultMinDuration);

// Gain g with 20 log10(g * rms(event) / rms(background)) = target_snr_db.
// Throws kInvalidArgument when either RMS is zero.
double SnrGain(const AudioClip& event, const AudioClip& background,
               double target_snr_db, int channel = 0);
double SnrGain(double event_rms, double background_rms, double target_snr_db);

struct MixtureEvent {
  std::string source_id;
  std::string label;
  double onset = 0.0;  // seconds
  double snr_db = 0.0;

  friend bool operator==(const MixtureEvent&, const MixtureEvent&) = default;
};

inline constexpr int kDefaultSampleRate = 32000;
inline constexpr double kDefaultClipDuration = 10.0;
inline constexpr int kMinEvents = 1;
inline constexpr int kMaxEvents = 3;
inline constexpr double kMinSnrDb = 5.0;
inline constexpr double kMaxSnrDb = 20.0;

// Ground truth for one synthesized mixture.
struct MixtureManifest {
  std::string clip_id;
  double duration = kDefaultClipDuration;
  int sample_rate = kDefaultSampleRate;
  std::vector<MixtureEvent> events;
  // "white:<dBFS>" for seeded Gaussian noise at that RMS level, otherwise a
  // source id looped or cut to the clip length.
  std::string noise = "white:-30";
  std::uint64_t seed = 0;
  double normalization_gain = 1.0;

  std::size_t frame_count() const;
  LabelSet Labels() const;
  // 1-3 events with distinct classes, onsets inside the clip; with
  // `check_snr_range`, every SNR inside [5, 20] dB. Throws kValidation.
  void Validate(bool check_snr_range = true) const;

  friend bool operator==(const MixtureManifest&, const MixtureManifest&) = default;
};

using SourceResolver = std::function<AudioClip(const std::string& source_id)>;

struct SynthesisResult {
  AudioClip mixture;
  AudioClip noise;
  StemMap stems;
  double normalization_gain = 1.0;
};

// Mono additive synthesis: every event (channel 0 of its source) is scaled to
// its SNR against the full-clip RMS of the noise bed, measured over the
// event's own span, and placed at its onset. mixture = noise + sum of stems.
// If the mixture peak exceeds 1 the mixture, noise and stems share one
// normalisation gain (0.99 / peak).
//
// Throws kInvalidArgument on a sample-rate mismatch, kUnknownClip for an
// unresolvable source, kValidation when an event overruns the clip.
SynthesisResult SynthesizeMixture(const MixtureManifest& manifest,
                                  const SourceResolver& resolver);

struct SourcePool {
  std::map<std::string, std::vector<SourceRecord>> by_class;
  std::vector<std::string> noise_ids;  // empty: use CorpusParams::noise
};

struct CorpusParams {
  std::size_t clips = 10;
  std::uint64_t seed = 0;
  double duration = kDefaultClipDuration;
  int sample_rate = kDefaultSampleRate;
  int min_events = kMinEvents;
  int max_events = kMaxEvents;
  double snr_min_db = kMinSnrDb;
  double snr_max_db = kMaxSnrDb;
  std::string noise = "white:-30";
  std::string clip_prefix = "mix";

  void Validate() const;
};

// Plans `clips` mixtures: event count uniform in [min_events, max_events],
// classes drawn without replacement, source uniform within its class among
// records that fit the clip, onset uniform, SNR uniform in [snr_min, snr_max].
// Clip i draws from its own RNG stream seeded by (seed, i), so the plan does
// not depend on how clips are scheduled. Throws kInsufficientPool.
std::vector<MixtureManifest> PlanCorpus(const SourcePool& pool,
                                        const CorpusParams& params);

// Synthesizes and writes every planned clip under `root`:
//   root/manifest.jsonl, root/<clip>/mixture.wav, root/<clip>/noise.wav,
//   root/<clip>/stems/<class>.wav   (32-bit float)
// Returns the manifests with their normalisation gains filled in.
std::vector<MixtureManifest> WriteCorpus(const std::vector<MixtureManifest>& plan,
                                         const SourceResolver& resolver,
                                         const std::string& root,
                                         std::size_t jobs = 1);

// Desk-scale procedural source pool: `per_class` records per class with
// class-specific pitch, partial count and envelope, and durations uniform in
// [min_duration, max_duration]. Audio is kept in memory.
struct SyntheticPool {
  std::vector<SourceRecord> records;
  std::map<std::string, AudioClip> audio;

  // The resolver holds its own copy of the audio.
  SourceResolver Resolver() const;
};
SyntheticPool MakeSyntheticPool(const ClassVocabulary& vocab, std::size_t per_class,
                                std::uint64_t seed,
                                int sample_rate = kDefaultSampleRate,
                                double min_duration = 1.0, double max_duration = 4.0);

SourcePool PoolFromRecords(const std::vector<SourceRecord>& records);
// Resolves ids through the records' paths (read_wav).
SourceResolver FileResolver(const std::vector<SourceRecord>& records);

// --- Line-delimited formats -------------------------------------------------

// Manifest: a header line {"format":"s5kit-manifest","version":1} then one
// JSON object per clip.
std::string FormatManifest(const std::vector<MixtureManifest>& manifests);
void WriteManifest(const std::vector<MixtureManifest>& manifests, const std::string& path);
// Throws kParse with the 1-based line number of the first malformed line.
std::vector<MixtureManifest> ParseManifest(const std::string& text,
                                           const ClassVocabulary& vocab);
std::vector<MixtureManifest> ReadManifest(const std::string& path,
                                          const ClassVocabulary& vocab);

// Source list: one JSON object per line with id, class, path and optional
// duration, heterogeneous and added_external. Relative paths resolve against
// the list's directory; a missing duration is read from the WAV header.
std::vector<SourceRecord> ReadSourceList(const std::string& path,
                                         const ClassVocabulary& vocab);
void WriteSourceList(const std::vector<SourceRecord>& records, const std::string& path);

// Flag file: one source id per line; blank lines and '#' comments skipped.
std::set<std::string> ReadIdList(const std::string& path);
// Sets the heterogeneous / added_external flags from id sets. Throws
// kValidation for ids that match no record.
void ApplyFlags(std::vector<SourceRecord>& records,
                const std::set<std::string>& heterogeneous,
                const std::set<std::string>& added);

std::string FormatAuditTable(const std::vector<ClassAudit>& rows);

}  // namespace s5kit

#endif  // S5KIT_DATASET_H_
