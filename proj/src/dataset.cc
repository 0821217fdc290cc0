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

#include "s5kit/dataset.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <sstream>

#include "s5kit/error.h"
#include "s5kit/file_util.h"
#include "s5kit/parallel.h"
#include "s5kit/wav.h"

namespace s5kit {
namespace {

constexpr double kNormalizationPeak = 0.99;

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::uint64_t StreamSeed(std::uint64_t seed, std::uint64_t index) {
  return SplitMix64(SplitMix64(seed) ^ (index * 0xd1b54a32d192ed03ull));
}

AudioClip MakeNoiseBed(const MixtureManifest& m, const SourceResolver& resolver) {
  const std::size_t frames = m.frame_count();
  std::vector<float> bed(frames, 0.0f);
  if (m.noise.rfind("white:", 0) == 0) {
    double level_db = 0.0;
    try {
      level_db = std::stod(m.noise.substr(6));
    } catch (const std::exception&) {
      throw Error(ErrorCode::kValidation, "bad noise spec '" + m.noise + "'");
    }
    const double sigma = std::pow(10.0, level_db / 20.0);
    std::mt19937_64 rng(m.seed);
    std::normal_distribution<double> gauss(0.0, sigma);
    for (float& s : bed) s = static_cast<float>(gauss(rng));
  } else {
    const AudioClip src = resolver(m.noise);
    if (src.sample_rate() != m.sample_rate) {
      throw Error(ErrorCode::kInvalidArgument,
                  "noise '" + m.noise + "' is at " + std::to_string(src.sample_rate()) +
                      " Hz, clip is " + std::to_string(m.sample_rate) + " Hz");
    }
    const auto ch = src.channel(0);
    if (ch.empty()) throw Error(ErrorCode::kInvalidArgument, "noise '" + m.noise + "' is empty");
    for (std::size_t i = 0; i < frames; ++i) bed[i] = ch[i % ch.size()];
  }
  return AudioClip::Mono(std::move(bed), m.sample_rate);
}

}  // namespace

PartitionResult FilterShort(const std::vector<SourceRecord>& records, double min_duration) {
  if (!(min_duration > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "min_duration must be positive");
  }
  PartitionResult out;
  for (const auto& r : records) {
    (r.duration >= min_duration ? out.kept : out.removed).push_back(r);
  }
  return out;
}

ClassAudit AuditClass(const std::vector<SourceRecord>& records, double min_duration) {
  ClassAudit audit;
  if (records.empty()) return audit;
  audit.label = records.front().label;
  std::vector<SourceRecord> original;
  for (const auto& r : records) {
    if (r.label != audit.label) {
      throw Error(ErrorCode::kInvalidArgument, "audit_class got mixed classes '" +
                                                   audit.label + "' and '" + r.label + "'");
    }
    if (r.added_external) {
      ++audit.added;
    } else {
      original.push_back(r);
    }
  }
  audit.original = original.size();
  const PartitionResult split = FilterShort(original, min_duration);
  audit.short_removed = split.removed.size();
  audit.heterogeneous_removed = static_cast<std::size_t>(
      std::count_if(split.kept.begin(), split.kept.end(),
                    [](const SourceRecord& r) { return r.heterogeneous; }));
  audit.final_count =
      audit.original - audit.short_removed - audit.heterogeneous_removed + audit.added;
  return audit;
}

std::vector<ClassAudit> AuditCorpus(const std::vector<SourceRecord>& records,
                                    const ClassVocabulary& vocab, double min_duration) {
  std::vector<std::vector<SourceRecord>> by_class(vocab.size());
  for (const auto& r : records) by_class[vocab.index(r.label)].push_back(r);
  std::vector<ClassAudit> rows;
  for (std::size_t c = 0; c < vocab.size(); ++c) {
    ClassAudit row = AuditClass(by_class[c], min_duration);
    row.label = vocab.name(c);
    rows.push_back(row);
  }
  return rows;
}

std::vector<SourceRecord> RefinedPool(const std::vector<SourceRecord>& records,
                                      double min_duration) {
  std::vector<SourceRecord> out;
  for (const auto& r : records) {
    if (r.added_external || (r.duration >= min_duration && !r.heterogeneous)) {
      out.push_back(r);
    }
  }
  return out;
}

double SnrGain(double event_rms, double background_rms, double target_snr_db) {
  if (!(event_rms > 0.0) || !(background_rms > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "snr_gain needs nonzero event and background RMS");
  }
  return std::pow(10.0, target_snr_db / 20.0) * background_rms / event_rms;
}

double SnrGain(const AudioClip& event, const AudioClip& background,
               double target_snr_db, int channel) {
  return SnrGain(Rms(event, channel), Rms(background, channel), target_snr_db);
}

std::size_t MixtureManifest::frame_count() const {
  return static_cast<std::size_t>(std::llround(duration * sample_rate));
}

LabelSet MixtureManifest::Labels() const {
  LabelSet out;
  for (const auto& e : events) out.insert(e.label);
  return out;
}

void MixtureManifest::Validate(bool check_snr_range) const {
  auto fail = [this](const std::string& what) {
    return Error(ErrorCode::kValidation, "manifest '" + clip_id + "': " + what);
  };
  if (clip_id.empty()) throw fail("empty clip id");
  if (!(duration > 0.0) || sample_rate <= 0) throw fail("bad duration or sample rate");
  if (events.size() < kMinEvents || events.size() > kMaxEvents) {
    throw fail(std::to_string(events.size()) + " events, valid range is " +
               std::to_string(kMinEvents) + "-" + std::to_string(kMaxEvents));
  }
  std::set<std::string> seen;
  for (const auto& e : events) {
    if (!seen.insert(e.label).second) throw fail("class '" + e.label + "' appears twice");
    if (!(e.onset >= 0.0) || e.onset >= duration) throw fail("onset outside the clip");
    if (!std::isfinite(e.snr_db)) throw fail("non-finite SNR");
    if (check_snr_range && (e.snr_db < kMinSnrDb || e.snr_db > kMaxSnrDb)) {
      throw fail("SNR " + std::to_string(e.snr_db) + " dB outside [5, 20] dB");
    }
  }
}

SynthesisResult SynthesizeMixture(const MixtureManifest& manifest,
                                  const SourceResolver& resolver) {
  manifest.Validate(false);
  const std::size_t frames = manifest.frame_count();
  SynthesisResult out;
  out.noise = MakeNoiseBed(manifest, resolver);
  const double noise_rms = Rms(out.noise, 0);

  std::vector<float> mix(out.noise.channel(0).begin(), out.noise.channel(0).end());
  for (const auto& event : manifest.events) {
    AudioClip source;
    try {
      source = resolver(event.source_id);
    } catch (const Error& e) {
      throw Error(ErrorCode::kUnknownClip,
                  "cannot resolve source '" + event.source_id + "': " + e.what());
    }
    if (source.sample_rate() != manifest.sample_rate) {
      throw Error(ErrorCode::kInvalidArgument,
                  "source '" + event.source_id + "' is at " +
                      std::to_string(source.sample_rate()) + " Hz, clip is " +
                      std::to_string(manifest.sample_rate) + " Hz");
    }
    const auto samples = source.channel(0);
    const auto onset = static_cast<std::size_t>(std::llround(event.onset * manifest.sample_rate));
    if (onset + samples.size() > frames) {
      throw Error(ErrorCode::kValidation,
                  "event '" + event.source_id + "' overruns clip '" + manifest.clip_id + "'");
    }
    const double gain = SnrGain(Rms(samples), noise_rms, event.snr_db);
    std::vector<float> stem(frames, 0.0f);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      stem[onset + i] = static_cast<float>(gain * samples[i]);
    }
    for (std::size_t i = 0; i < frames; ++i) mix[i] += stem[i];
    out.stems.emplace(event.label, AudioClip::Mono(std::move(stem), manifest.sample_rate));
  }

  float peak = 0.0f;
  for (float s : mix) peak = std::max(peak, std::abs(s));
  out.mixture = AudioClip::Mono(std::move(mix), manifest.sample_rate);
  if (peak > 1.0f) {
    out.normalization_gain = kNormalizationPeak / peak;
    out.mixture = out.mixture.Scaled(out.normalization_gain);
    out.noise = out.noise.Scaled(out.normalization_gain);
    for (auto& [label, stem] : out.stems) stem = stem.Scaled(out.normalization_gain);
  }
  return out;
}

void CorpusParams::Validate() const {
  if (min_events < kMinEvents || max_events > kMaxEvents || min_events > max_events) {
    throw Error(ErrorCode::kInvalidArgument,
                "events per clip must lie in " + std::to_string(kMinEvents) + "-" +
                    std::to_string(kMaxEvents) + " (got " + std::to_string(min_events) +
                    "-" + std::to_string(max_events) + ")");
  }
  if (!(snr_min_db <= snr_max_db)) {
    throw Error(ErrorCode::kInvalidArgument, "snr range is empty");
  }
  if (!(duration > 0.0) || sample_rate <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "bad clip duration or sample rate");
  }
}

std::vector<MixtureManifest> PlanCorpus(const SourcePool& pool, const CorpusParams& params) {
  params.Validate();
  const auto clip_frames = static_cast<std::size_t>(std::llround(params.duration * params.sample_rate));

  // Eligible records per class, in pool order.
  std::vector<std::pair<std::string, std::vector<const SourceRecord*>>> classes;
  for (const auto& [label, records] : pool.by_class) {
    std::vector<const SourceRecord*> fit;
    for (const auto& r : records) {
      const auto frames = static_cast<std::size_t>(std::ceil(r.duration * params.sample_rate));
      if (r.duration > 0.0 && frames <= clip_frames) fit.push_back(&r);
    }
    if (!fit.empty()) classes.emplace_back(label, std::move(fit));
  }
  if (classes.size() < static_cast<std::size_t>(params.max_events)) {
    throw Error(ErrorCode::kInsufficientPool,
                "pool has " + std::to_string(classes.size()) +
                    " usable classes, need at least " + std::to_string(params.max_events));
  }

  std::vector<MixtureManifest> plan(params.clips);
  for (std::size_t i = 0; i < params.clips; ++i) {
    MixtureManifest& m = plan[i];
    char id[64];
    std::snprintf(id, sizeof(id), "%s%05zu", params.clip_prefix.c_str(), i);
    m.clip_id = id;
    m.duration = params.duration;
    m.sample_rate = params.sample_rate;
    m.seed = StreamSeed(params.seed, i);
    std::mt19937_64 rng(m.seed);

    const int n_events =
        std::uniform_int_distribution<int>(params.min_events, params.max_events)(rng);
    std::vector<std::size_t> order(classes.size());
    for (std::size_t c = 0; c < order.size(); ++c) order[c] = c;
    // Partial Fisher-Yates: the first n_events entries are the chosen classes.
    for (int e = 0; e < n_events; ++e) {
      const std::size_t j =
          std::uniform_int_distribution<std::size_t>(e, order.size() - 1)(rng);
      std::swap(order[e], order[j]);
    }
    for (int e = 0; e < n_events; ++e) {
      const auto& [label, records] = classes[order[e]];
      const SourceRecord& r =
          *records[std::uniform_int_distribution<std::size_t>(0, records.size() - 1)(rng)];
      const auto event_frames = static_cast<std::size_t>(std::ceil(r.duration * params.sample_rate));
      const std::size_t onset =
          std::uniform_int_distribution<std::size_t>(0, clip_frames - event_frames)(rng);
      const double snr =
          std::uniform_real_distribution<double>(params.snr_min_db, params.snr_max_db)(rng);
      m.events.push_back({r.id, label, static_cast<double>(onset) / params.sample_rate, snr});
    }
    if (!pool.noise_ids.empty()) {
      m.noise = pool.noise_ids[std::uniform_int_distribution<std::size_t>(
          0, pool.noise_ids.size() - 1)(rng)];
    } else {
      m.noise = params.noise;
    }
  }
  return plan;
}

std::vector<MixtureManifest> WriteCorpus(const std::vector<MixtureManifest>& plan,
                                         const SourceResolver& resolver,
                                         const std::string& root, std::size_t jobs) {
  namespace fs = std::filesystem;
  std::vector<MixtureManifest> written = plan;
  ParallelFor(plan.size(), jobs, [&](std::size_t i, std::size_t) {
    const SynthesisResult result = SynthesizeMixture(plan[i], resolver);
    const fs::path dir = fs::path(root) / plan[i].clip_id;
    WriteWav(result.mixture, (dir / "mixture.wav").string());
    WriteWav(result.noise, (dir / "noise.wav").string());
    for (const auto& [label, stem] : result.stems) {
      WriteWav(stem, (dir / "stems" / (label + ".wav")).string());
    }
    written[i].normalization_gain = result.normalization_gain;
  });
  WriteManifest(written, (fs::path(root) / "manifest.jsonl").string());
  return written;
}

SourceResolver SyntheticPool::Resolver() const {
  auto clips = std::make_shared<const std::map<std::string, AudioClip>>(audio);
  return [clips](const std::string& id) -> AudioClip {
    auto it = clips->find(id);
    if (it == clips->end()) throw Error(ErrorCode::kUnknownClip, "no synthetic source '" + id + "'");
    return it->second;
  };
}

SyntheticPool MakeSyntheticPool(const ClassVocabulary& vocab, std::size_t per_class,
                                std::uint64_t seed, int sample_rate, double min_duration,
                                double max_duration) {
  if (!(min_duration > 0.0 && min_duration <= max_duration)) {
    throw Error(ErrorCode::kInvalidArgument, "bad synthetic duration range");
  }
  SyntheticPool pool;
  const double nyquist = sample_rate / 2.0;
  for (std::size_t c = 0; c < vocab.size(); ++c) {
    for (std::size_t k = 0; k < per_class; ++k) {
      std::mt19937_64 rng(StreamSeed(seed, c * 100003 + k));
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      const double duration = min_duration + (max_duration - min_duration) * unit(rng);
      const auto frames = static_cast<std::size_t>(std::llround(duration * sample_rate));
      const double f0 = 150.0 * std::pow(2.0, 0.25 * static_cast<double>(c)) *
                        (0.97 + 0.06 * unit(rng));
      const int partials = 1 + static_cast<int>(c % 4);
      const int envelope = static_cast<int>(c % 3);
      const double burst_rate = 3.0 + static_cast<double>(c % 5);
      const double amplitude = 0.3 + 0.4 * unit(rng);
      const double phase = 2.0 * std::numbers::pi * unit(rng);

      std::vector<float> samples(frames);
      for (std::size_t n = 0; n < frames; ++n) {
        const double t = static_cast<double>(n) / sample_rate;
        double v = 0.0;
        for (int p = 1; p <= partials; ++p) {
          const double f = f0 * p;
          if (f >= nyquist) break;
          v += std::sin(2.0 * std::numbers::pi * f * t + phase * p) / p;
        }
        double env = 1.0;
        if (envelope == 1) {
          env = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * burst_rate * t));
        } else if (envelope == 2) {
          env = std::exp(-3.0 * t / duration);
        }
        const double fade = std::min({1.0, t / 0.01, (duration - t) / 0.01});
        samples[n] = static_cast<float>(amplitude * env * std::max(fade, 0.0) * v);
      }
      char id[96];
      std::snprintf(id, sizeof(id), "%s-%03zu", vocab.name(c).c_str(), k);
      SourceRecord record;
      record.id = id;
      record.label = vocab.name(c);
      record.path = "synthetic://" + record.id;
      record.duration = static_cast<double>(frames) / sample_rate;
      pool.audio.emplace(record.id, AudioClip::Mono(std::move(samples), sample_rate));
      pool.records.push_back(std::move(record));
    }
  }
  return pool;
}

SourcePool PoolFromRecords(const std::vector<SourceRecord>& records) {
  SourcePool pool;
  for (const auto& r : records) pool.by_class[r.label].push_back(r);
  return pool;
}

SourceResolver FileResolver(const std::vector<SourceRecord>& records) {
  auto paths = std::make_shared<std::map<std::string, std::string>>();
  for (const auto& r : records) (*paths)[r.id] = r.path;
  return [paths](const std::string& id) -> AudioClip {
    auto it = paths->find(id);
    if (it == paths->end()) throw Error(ErrorCode::kUnknownClip, "unknown source id '" + id + "'");
    return ReadWav(it->second);
  };
}

std::string FormatAuditTable(const std::vector<ClassAudit>& rows) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-20s %9s %9s %13s %7s %7s\n", "Class", "Original",
                "Short", "Heterogeneous", "Added", "Final");
  out << line;
  ClassAudit total;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof(line), "%-20s %9zu %9zu %13zu %7s %7zu\n", r.label.c_str(),
                  r.original, r.short_removed, r.heterogeneous_removed,
                  r.added ? std::to_string(r.added).c_str() : "-", r.final_count);
    out << line;
    total.original += r.original;
    total.short_removed += r.short_removed;
    total.heterogeneous_removed += r.heterogeneous_removed;
    total.added += r.added;
    total.final_count += r.final_count;
  }
  std::snprintf(line, sizeof(line), "%-20s %9zu %9zu %13zu %7zu %7zu\n", "Total", total.original,
                total.short_removed, total.heterogeneous_removed, total.added,
                total.final_count);
  out << line;
  return out.str();
}

}  // namespace s5kit
