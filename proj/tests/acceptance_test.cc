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

// Acceptance suite: one PASS/FAIL line per exit criterion. Exits non-zero if
// any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "s5kit/agent.h"
#include "s5kit/backends.h"
#include "s5kit/dataset.h"
#include "s5kit/error.h"
#include "s5kit/external_backend.h"
#include "s5kit/features.h"
#include "s5kit/file_util.h"
#include "s5kit/metrics.h"
#include "refinement_fixture.h"

namespace s5kit {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects failure reasons; the first few are reported.
class Check {
 public:
  void Expect(bool ok, const std::string& what) {
    if (ok) return;
    ++failures_;
    if (failures_ <= 3) reasons_ += (reasons_.empty() ? "" : "; ") + what;
  }
  Outcome Done(std::string detail) const {
    if (failures_ == 0) return {true, std::move(detail)};
    std::string d = reasons_;
    if (failures_ > 3) d += "; +" + std::to_string(failures_ - 3) + " more";
    return {false, d};
  }

 private:
  int failures_ = 0;
  std::string reasons_;
};

std::string Fmt(double v, int precision = 6) {
  std::ostringstream os;
  os.precision(precision);
  os << v;
  return os.str();
}

// Tagging-accuracy worked example: three true classes, one recovered, two spurious.
Outcome Criterion1() {
  const ClassVocabulary& vocab = ClassVocabulary::Default();
  const EvalCounts counts =
      CountMatches({"Cough", "Pour", "Typing"}, {"Cough", "Speech", "Dishes"}, vocab);
  const double acc = FpPenalizedAccuracy(counts);
  Check c;
  c.Expect(counts == EvalCounts{1, 2, 2}, "counts differ from tp=1 fn=2 fp=2");
  c.Expect(acc == 0.2, "accuracy " + Fmt(acc, 17) + " != 0.20");
  return c.Done("accuracy = " + Fmt(acc));
}

Outcome Criterion2() {
  const double acc = MacroAccuracy({"Cough", "Speech"}, {"Cough", "Speech", "Dishes"});
  Check c;
  c.Expect(std::abs(acc - 0.667) <= 5e-4, "macro accuracy " + Fmt(acc));
  return c.Done("macro accuracy = " + Fmt(acc));
}

Outcome Criterion3() {
  const auto rows = AuditCorpus(testing::RefinementRecords(), ClassVocabulary::Default());
  Check c;
  std::size_t matched = 0;
  for (const auto& row : testing::kRefinementCounts) {
    const auto it = std::find_if(rows.begin(), rows.end(),
                                 [&](const ClassAudit& a) { return a.label == row.label; });
    if (it == rows.end()) {
      c.Expect(false, std::string(row.label) + " missing from audit");
      continue;
    }
    const bool ok = it->original == row.original && it->short_removed == row.short_removed &&
                    it->heterogeneous_removed == row.heterogeneous_removed &&
                    it->added == row.added && it->final_count == row.reference_final;
    c.Expect(ok, std::string(row.label) + " final " + std::to_string(it->final_count) +
                     " vs reference " + std::to_string(row.reference_final));
    matched += ok ? 1 : 0;
  }
  return c.Done(std::to_string(matched) + "/18 classes reproduce the reference final count");
}

std::vector<double> DirectDftPower(std::span<const float> x, bool hann) {
  const std::size_t n = x.size();
  std::vector<double> out(n / 2 + 1);
  for (std::size_t k = 0; k < out.size(); ++k) {
    std::complex<long double> acc = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const long double w =
          hann ? 0.5L - 0.5L * std::cos(2.0L * std::numbers::pi_v<long double> * i / n) : 1.0L;
      const long double phase = -2.0L * std::numbers::pi_v<long double> * k * i / n;
      acc += std::complex<long double>(w * x[i] * std::cos(phase), w * x[i] * std::sin(phase));
    }
    out[k] = static_cast<double>(std::norm(acc));
  }
  return out;
}

Outcome Criterion4() {
  Check c;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<float> u(-1.f, 1.f);
  double worst_dft = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<float> x(256);
    for (auto& v : x) v = u(rng);
    const AudioClip clip = AudioClip::Mono(x, 16000);
    const auto power = StftPower(clip, 0, {256, 256, 256, WindowType::kHann});
    const auto oracle = DirectDftPower(clip.channel(0), true);
    for (std::size_t k = 0; k < oracle.size(); ++k) {
      worst_dft = std::max(worst_dft, std::abs(power.at(0, k) - oracle[k]) / oracle[k]);
    }
  }
  c.Expect(worst_dft <= 1e-6, "STFT vs DFT relative error " + Fmt(worst_dft));

  double worst_parseval = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<float> x(512);
    for (auto& v : x) v = u(rng);
    double energy = 0.0;
    for (float v : x) energy += static_cast<double>(v) * v;
    const auto p =
        StftPower(AudioClip::Mono(x, 16000), 0, {512, 512, 512, WindowType::kRectangular});
    double spectral = p.at(0, 0) + p.at(0, 256);
    for (std::size_t k = 1; k < 256; ++k) spectral += 2.0 * p.at(0, k);
    worst_parseval = std::max(worst_parseval, std::abs(spectral / 512.0 / energy - 1.0));
  }
  c.Expect(worst_parseval <= 1e-6, "Parseval error " + Fmt(worst_parseval));

  std::vector<float> noise(16000);
  for (auto& v : noise) v = u(rng);
  const auto power = StftPower(AudioClip::Mono(noise, 16000), 0);
  std::vector<FeatureMatrix> rolloffs;
  for (double kappa : {0.1, 0.3, 0.5, 0.7, 0.85, 0.95, 0.99}) {
    rolloffs.push_back(SpectralRolloff(power, {kappa}));
  }
  bool monotone = true;
  for (std::size_t i = 1; i < rolloffs.size(); ++i) {
    for (std::size_t f = 0; f < power.frames(); ++f) {
      monotone = monotone && rolloffs[i].at(f, 0) >= rolloffs[i - 1].at(f, 0);
    }
  }
  c.Expect(monotone, "roll-off not monotone in kappa");

  auto chroma_argmax = [](double hz) {
    std::vector<float> x(32000);
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = static_cast<float>(0.5 * std::sin(2.0 * std::numbers::pi * hz * i / 32000.0));
    }
    const auto p = StftPower(AudioClip::Mono(x, 32000), 0, {8192, 8192, 2048, WindowType::kHann});
    const auto chroma = Chroma(p);
    std::vector<double> total(12, 0.0);
    for (std::size_t f = 0; f < chroma.frames(); ++f) {
      for (std::size_t b = 0; b < 12; ++b) total[b] += chroma.at(f, b);
    }
    return static_cast<int>(std::max_element(total.begin(), total.end()) - total.begin());
  };
  const int a440 = chroma_argmax(440.0);
  const int a880 = chroma_argmax(880.0);
  c.Expect(a440 == 9 && a880 == 9,
           "chroma argmax " + std::to_string(a440) + "/" + std::to_string(a880) + ", want A=9");
  return c.Done("max DFT error " + Fmt(worst_dft, 3) + ", Parseval error " +
                Fmt(worst_parseval, 3) + ", chroma argmax A");
}

AudioClip Gaussian(std::size_t frames, std::uint64_t seed, double sigma = 0.1) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, sigma);
  std::vector<float> x(frames);
  for (auto& v : x) v = static_cast<float>(dist(rng));
  return AudioClip::Mono(std::move(x), 16000);
}

Outcome Criterion5() {
  Check c;
  const AudioClip ref = Gaussian(16000, 5);
  const double half = Sdr(ref.Scaled(0.5), ref);
  c.Expect(std::abs(half - 6.0206) <= 1e-6, "SDR(0.5 ref) = " + Fmt(half, 10));
  const double same = Sdr(ref, ref);
  c.Expect(same == 100.0, "SDR(ref) = " + Fmt(same));

  const StemMap truth = {{"Cough", Gaussian(16000, 6)}, {"Speech", Gaussian(16000, 7)}};
  std::vector<float> mix(16000, 0.0f);
  for (const auto& [label, stem] : truth) {
    for (std::size_t i = 0; i < mix.size(); ++i) mix[i] += stem.channel(0)[i];
  }
  const AudioClip mixture = AudioClip::Mono(mix, 16000);
  StemMap est;
  for (const auto& [label, stem] : truth) est.emplace(label, mixture);
  const double zero = CaSdri(truth, est, mixture).mean_db;
  c.Expect(zero == 0.0, "CA-SDRi(mixture) = " + Fmt(zero, 17));
  return c.Done("SDR(0.5 ref) = " + Fmt(half, 8) + " dB, SDR(ref) = " + Fmt(same) +
                " dB, CA-SDRi(mixture) = " + Fmt(zero));
}

struct SyntheticClip {
  MixtureManifest manifest;
  SynthesisResult audio;
};

std::vector<SyntheticClip> SynthesizeCorpus(std::size_t clips, int min_events, int max_events,
                                            std::uint64_t seed) {
  const SyntheticPool pool = MakeSyntheticPool(ClassVocabulary::Default(), 4, seed, 16000);
  CorpusParams params;
  params.clips = clips;
  params.seed = seed;
  params.duration = 4.0;
  params.sample_rate = 16000;
  params.min_events = min_events;
  params.max_events = max_events;
  const auto resolver = pool.Resolver();
  std::vector<SyntheticClip> out;
  for (const auto& m : PlanCorpus(PoolFromRecords(pool.records), params)) {
    out.push_back({m, SynthesizeMixture(m, resolver)});
  }
  return out;
}

// Mean over the union of true and estimated classes; classes on one side
// only count zero.
double UnionMeanOracle(const StemMap& truth, const StemMap& est, const AudioClip& mixture) {
  std::set<std::string> classes;
  for (const auto& [label, stem] : truth) classes.insert(label);
  for (const auto& [label, stem] : est) classes.insert(label);
  double sum = 0.0;
  for (const auto& label : classes) {
    if (!truth.contains(label) || !est.contains(label)) continue;
    sum += Sdr(est.at(label), truth.at(label)) - Sdr(mixture, truth.at(label));
  }
  return sum / static_cast<double>(classes.size());
}

Outcome Criterion6() {
  Check c;
  const auto corpus = SynthesizeCorpus(50, 2, 2, 6);
  c.Expect(corpus.size() == 50, "corpus has " + std::to_string(corpus.size()) + " clips");
  const auto& vocab = ClassVocabulary::Default().labels();
  double perfect = 0.0, with_fp = 0.0, missing_tp = 0.0;
  for (const auto& clip : corpus) {
    const StemMap& truth = clip.audio.stems;
    c.Expect(truth.size() == 2, clip.manifest.clip_id + " does not carry 2 events");
    perfect += CaSdri(truth, truth, clip.audio.mixture).mean_db;
    StemMap fp = truth;
    for (const auto& label : vocab) {
      if (!truth.contains(label)) {
        fp.emplace(label, AudioClip::Silence(clip.audio.mixture.frame_count(), 16000));
        break;
      }
    }
    with_fp += CaSdri(truth, fp, clip.audio.mixture).mean_db;
    StemMap dropped = truth;
    dropped.erase(dropped.begin());
    missing_tp += CaSdri(truth, dropped, clip.audio.mixture).mean_db;
  }
  const double n = static_cast<double>(corpus.size());
  perfect /= n;
  with_fp /= n;
  missing_tp /= n;
  c.Expect(with_fp < perfect, "FP did not decrease CA-SDRi");
  c.Expect(missing_tp < perfect, "removing a TP did not decrease CA-SDRi");

  // Every truth/prediction split of a four-class vocabulary with random stems.
  const std::vector<std::string> four = {"Cough", "Speech", "Dishes", "Typing"};
  std::size_t cases = 0;
  double worst = 0.0;
  for (unsigned t = 0; t < 16; ++t) {
    for (unsigned p = 0; p < 16; ++p) {
      if (t == 0 && p == 0) continue;
      StemMap truth, est;
      std::vector<float> mix(4000, 0.0f);
      for (unsigned b = 0; b < 4; ++b) {
        if (t & (1u << b)) {
          truth.emplace(four[b], Gaussian(4000, 100 + 16 * t + b));
          for (std::size_t i = 0; i < mix.size(); ++i) mix[i] += truth.at(four[b]).channel(0)[i];
        }
      }
      const AudioClip bed = Gaussian(4000, 5000 + cases, 0.01);
      for (std::size_t i = 0; i < mix.size(); ++i) mix[i] += bed.channel(0)[i];
      const AudioClip mixture = AudioClip::Mono(mix, 16000);
      for (unsigned b = 0; b < 4; ++b) {
        if (p & (1u << b)) {
          est.emplace(four[b], (t & (1u << b)) ? truth.at(four[b]).Scaled(0.9)
                                                : Gaussian(4000, 900 + 16 * p + b));
        }
      }
      const double got = CaSdri(truth, est, mixture).mean_db;
      const double want = UnionMeanOracle(truth, est, mixture);
      worst = std::max(worst, std::abs(got - want));
      ++cases;
    }
  }
  c.Expect(worst <= 1e-9, "union-mean mismatch " + Fmt(worst));
  return c.Done("mean CA-SDRi perfect " + Fmt(perfect, 5) + ", +FP " + Fmt(with_fp, 5) +
                ", -TP " + Fmt(missing_tp, 5) + " dB; " + std::to_string(cases) +
                " union cases match");
}

Outcome Criterion7() {
  Check c;
  const auto corpus = SynthesizeCorpus(50, 1, 3, 7);
  const ClassVocabulary& vocab = ClassVocabulary::Default();
  std::vector<OracleClip> clips;
  for (const auto& s : corpus) {
    clips.push_back({s.manifest.clip_id, s.audio.mixture, s.audio.stems});
  }
  auto oracle = std::make_shared<const OracleCorpus>(clips);

  OracleTaggerOptions options;
  std::map<std::string, std::string> injected;
  std::mt19937_64 rng(77);
  for (const auto& s : corpus) {
    const LabelSet truth = s.manifest.Labels();
    std::vector<std::string> absent;
    for (const auto& label : vocab.labels()) {
      if (!truth.contains(label)) absent.push_back(label);
    }
    const std::string fp = absent[rng() % absent.size()];
    injected[s.manifest.clip_id] = fp;
    options.injected[s.manifest.clip_id][fp] = 0.9;
  }
  const auto tagger = MakeOracleTagger(vocab, oracle, options);
  const auto separator = MakeOracleSeparator(oracle);
  const AgentConfig config;

  std::size_t fp_removed = 0, tp_candidates = 0, tp_kept = 0, max_final = 0, acc_ok = 0;
  for (const auto& s : corpus) {
    const LabelSet truth = s.manifest.Labels();
    const AgentTrace trace = AgentCorrect(s.audio.mixture, *tagger, *separator, config);
    const LabelSet final_set = trace.FinalSet();
    const std::string& fp = injected.at(s.manifest.clip_id);
    const bool fp_candidate = std::any_of(trace.candidates.begin(), trace.candidates.end(),
                                          [&](const ScoredLabel& l) { return l.label == fp; });
    c.Expect(fp_candidate, s.manifest.clip_id + ": injected class not a candidate");
    fp_removed += !final_set.contains(fp) ? 1 : 0;
    for (const auto& cand : trace.candidates) {
      if (!truth.contains(cand.label)) continue;
      ++tp_candidates;
      tp_kept += final_set.contains(cand.label) ? 1 : 0;
    }
    max_final = std::max(max_final, final_set.size());
    const double pre =
        FpPenalizedAccuracy(CountMatches(BaselinePrediction(trace.original_scores, config), truth, vocab));
    const double post = FpPenalizedAccuracy(CountMatches(final_set, truth, vocab));
    acc_ok += post >= pre ? 1 : 0;
  }
  const std::size_t n = corpus.size();
  c.Expect(n == 50, "corpus has " + std::to_string(n) + " clips");
  c.Expect(fp_removed == n, std::to_string(fp_removed) + "/" + std::to_string(n) + " FPs removed");
  c.Expect(tp_kept == tp_candidates,
           std::to_string(tp_kept) + "/" + std::to_string(tp_candidates) + " TPs kept");
  c.Expect(max_final <= 3, "final label count reached " + std::to_string(max_final));
  c.Expect(acc_ok == n, "post-agent accuracy fell on " + std::to_string(n - acc_ok) + " clips");

  // Corrupted re-tagger: isolated stems of one class are read as another.
  OracleTaggerOptions corrupted = options;
  corrupted.stem_confusions["Speech"] = "Typing";
  corrupted.stem_confusions["Cough"] = "Dishes";
  const auto bad_tagger = MakeOracleTagger(vocab, oracle, corrupted);
  std::size_t tp_removed = 0;
  for (const auto& s : corpus) {
    const LabelSet truth = s.manifest.Labels();
    const AgentTrace trace = AgentCorrect(s.audio.mixture, *bad_tagger, *separator, config);
    for (const auto& v : trace.verifications) {
      tp_removed += truth.contains(v.label) && !v.kept ? 1 : 0;
    }
  }
  c.Expect(tp_removed >= 1, "corrupted re-tagger removed no TP");
  return c.Done(std::to_string(fp_removed) + "/" + std::to_string(n) + " FPs removed, " +
                std::to_string(tp_kept) + "/" + std::to_string(tp_candidates) +
                " TPs kept, max final " + std::to_string(max_final) + ", corrupted run removed " +
                std::to_string(tp_removed) + " TPs");
}

Outcome Criterion8() {
  Check c;
  const ClassVocabulary& vocab = ClassVocabulary::Default();
  const std::vector<double> weights(kDefaultEnsembleWeights.begin(), kDefaultEnsembleWeights.end());
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int fixture = 0; fixture < 10; ++fixture) {
    std::vector<LabelScores> members;
    for (int m = 0; m < 4; ++m) {
      std::vector<double> s(vocab.size());
      for (auto& v : s) v = u(rng);
      members.emplace_back(vocab, s);
    }
    const LabelScores fused = EnsembleScores(members, weights);
    for (std::size_t k = 0; k < vocab.size(); ++k) {
      const double hand = 0.35 * members[0].at(k) + 0.3 * members[1].at(k) +
                          0.2 * members[2].at(k) + 0.15 * members[3].at(k);
      worst = std::max(worst, std::abs(fused.at(k) - hand));
    }
  }
  c.Expect(worst <= 1e-9, "weighted mean error " + Fmt(worst));

  std::vector<double> s(vocab.size());
  for (auto& v : s) v = u(rng);
  const LabelScores one(vocab, s);
  const std::vector<LabelScores> same(4, one);
  const LabelScores fused = EnsembleScores(same, weights);
  double identity = 0.0;
  for (std::size_t k = 0; k < vocab.size(); ++k) {
    identity = std::max(identity, std::abs(fused.at(k) - one.at(k)));
  }
  c.Expect(identity <= 1e-12, "identical members changed by " + Fmt(identity));
  return c.Done("max error " + Fmt(worst, 3) + ", identity error " + Fmt(identity, 3));
}

Outcome Criterion9(const fs::path& scratch) {
  Check c;
  const SyntheticPool pool = MakeSyntheticPool(ClassVocabulary::Default(), 4, 9, 16000);
  const auto resolver = pool.Resolver();
  CorpusParams params;
  params.clips = 50;
  params.seed = 9;
  params.duration = 4.0;
  params.sample_rate = 16000;
  const auto plan = PlanCorpus(PoolFromRecords(pool.records), params);

  double worst_snr = 0.0;
  std::size_t events = 0, exact_clips = 0;
  for (const auto& m : plan) {
    const SynthesisResult r = SynthesizeMixture(m, resolver);
    const double noise_rms = Rms(r.noise);
    for (const auto& e : m.events) {
      const std::size_t len = resolver(e.source_id).frame_count();
      const auto onset = static_cast<std::size_t>(std::llround(e.onset * m.sample_rate));
      const auto stem = r.stems.at(e.label).channel(0).subspan(onset, len);
      worst_snr = std::max(worst_snr,
                           std::abs(20.0 * std::log10(Rms(stem) / noise_rms) - e.snr_db));
      ++events;
    }
    if (r.normalization_gain != 1.0) continue;  // additivity holds before the shared gain
    bool exact = true;
    for (std::size_t i = 0; i < r.mixture.frame_count(); ++i) {
      float expect = r.noise.channel(0)[i];
      for (const auto& e : m.events) expect += r.stems.at(e.label).channel(0)[i];
      exact = exact && r.mixture.channel(0)[i] == expect;
    }
    c.Expect(exact, m.clip_id + ": mixture != noise + stems");
    exact_clips += exact ? 1 : 0;
  }
  c.Expect(worst_snr <= 0.1, "SNR error " + Fmt(worst_snr) + " dB");
  c.Expect(exact_clips > 0, "no unnormalised clip to check additivity on");

  fs::remove_all(scratch);
  WriteCorpus(plan, resolver, (scratch / "a").string(), 1);
  WriteCorpus(PlanCorpus(PoolFromRecords(pool.records), params), resolver,
              (scratch / "b").string(), 2);
  const bool same = ReadFileToString((scratch / "a/manifest.jsonl").string()) ==
                    ReadFileToString((scratch / "b/manifest.jsonl").string());
  c.Expect(same, "manifests differ between runs with the same seed");
  fs::remove_all(scratch);
  return c.Done(std::to_string(events) + " events, max SNR error " + Fmt(worst_snr, 3) +
                " dB, " + std::to_string(exact_clips) + " clips sample-exact, manifests identical");
}

template <typename Fn>
std::optional<ErrorCode> ErrorOf(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

Outcome Criterion10(const fs::path& scratch) {
  Check c;
  const ClassVocabulary vocab({"Cough", "Speech", "Dishes"});
  fs::create_directories(scratch);
  auto options = [&](const std::string& mode) {
    ExternalBackendOptions o;
    o.command = std::string(S5KIT_STUB_BACKEND) + " --mode " + mode;
    o.timeout = std::chrono::milliseconds(2000);
    o.scratch_root = scratch.string();
    return o;
  };
  const AudioClip clip = Gaussian(8000, 10);

  try {
    ExternalBackend echo(vocab, options("echo"));
    const LabelScores scores = echo.Tag(clip);
    c.Expect(scores.values().size() == 3, "tag returned wrong class count");
    const AudioClip stem = echo.Separate(clip, "Cough");
    c.Expect(stem == clip, "separate did not round-trip the stub's stem");
  } catch (const std::exception& e) {
    c.Expect(false, std::string("echo backend: ") + e.what());
  }

  struct Case {
    std::string mode;
    bool separate;
    ErrorCode want;
  };
  const std::vector<Case> cases = {
      {"error", false, ErrorCode::kBackend},        {"missing-class", false, ErrorCode::kValidation},
      {"out-of-range", false, ErrorCode::kValidation}, {"wrong-length", true, ErrorCode::kValidation},
      {"garbage", false, ErrorCode::kProtocol},     {"hang", false, ErrorCode::kTimeout},
  };
  for (const auto& k : cases) {
    const auto got = ErrorOf([&] {
      ExternalBackend b(vocab, options(k.mode));
      if (k.separate) {
        b.Separate(clip, "Cough");
      } else {
        b.Tag(clip);
      }
    });
    c.Expect(got == k.want, k.mode + ": wrong or missing error");
  }
  c.Expect(ErrorOf([&] { ExternalBackend b(vocab, options("bad-version")); }) ==
               ErrorCode::kProtocol,
           "bad-version accepted");
  ExternalBackendOptions missing = options("echo");
  missing.command = "/nonexistent/s5kit-backend";
  c.Expect(ErrorOf([&] { ExternalBackend b(vocab, missing); }) == ErrorCode::kBackendSpawn,
           "missing executable not reported as spawn failure");
  fs::remove_all(scratch);
  return c.Done("handshake, tag, separate and " + std::to_string(cases.size() + 2) +
                " error paths behave");
}

}  // namespace
}  // namespace s5kit

int main() {
  using namespace s5kit;
  const fs::path scratch = fs::temp_directory_path() / "s5kit_acceptance";
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"FP-penalized accuracy worked example", Criterion1},
      {"macro accuracy worked example", Criterion2},
      {"source pool audit reproduces reference finals", Criterion3},
      {"DSP oracle suite", Criterion4},
      {"SDR closed forms", Criterion5},
      {"CA-SDRi false-positive sensitivity", Criterion6},
      {"agent end-to-end on oracle corpus", Criterion7},
      {"ensemble weighted mean", Criterion8},
      {"synthesis fidelity", [&] { return Criterion9(scratch / "synthesis"); }},
      {"external backend conformance", [&] { return Criterion10(scratch / "backend"); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = criteria[i].second();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += outcome.pass ? 0 : 1;
    std::printf("%s criterion %2zu: %s: %s (%.2fs)\n", outcome.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first.c_str(), outcome.detail.c_str(), secs);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
