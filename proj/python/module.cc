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

// Python bindings for the s5kit core: audio I/O, features, metrics, the
// ensemble, agent correction with Python-side backends, and corpus tooling.

#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <string>
#include <vector>

#include "s5kit/agent.h"
#include "s5kit/backends.h"
#include "s5kit/dataset.h"
#include "s5kit/error.h"
#include "s5kit/features.h"
#include "s5kit/metrics.h"
#include "s5kit/report.h"
#include "s5kit/wav.h"

namespace py = pybind11;

namespace s5kit {
namespace {

using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;
using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

// 1-D arrays are mono; 2-D arrays are (channels, frames).
AudioClip ToClip(const FloatArray& samples, int sample_rate) {
  const auto buf = samples.request();
  if (buf.ndim == 1) {
    const float* p = samples.data();
    return AudioClip::Mono(std::vector<float>(p, p + buf.shape[0]), sample_rate);
  }
  if (buf.ndim != 2) throw Error(ErrorCode::kInvalidArgument, "audio must be 1-D or 2-D");
  std::vector<std::vector<float>> channels(buf.shape[0]);
  for (py::ssize_t c = 0; c < buf.shape[0]; ++c) {
    const float* p = samples.data(c, 0);
    channels[c].assign(p, p + buf.shape[1]);
  }
  return AudioClip(std::move(channels), sample_rate);
}

py::array_t<float> FromClip(const AudioClip& clip) {
  const auto frames = static_cast<py::ssize_t>(clip.frame_count());
  if (clip.channel_count() == 1) {
    py::array_t<float> out(frames);
    std::copy(clip.channel(0).begin(), clip.channel(0).end(), out.mutable_data());
    return out;
  }
  py::array_t<float> out({static_cast<py::ssize_t>(clip.channel_count()), frames});
  for (int c = 0; c < clip.channel_count(); ++c) {
    std::copy(clip.channel(c).begin(), clip.channel(c).end(), out.mutable_data(c, 0));
  }
  return out;
}

py::array_t<double> FromMatrix(const FeatureMatrix& m) {
  py::array_t<double> out({static_cast<py::ssize_t>(m.frames()),
                           static_cast<py::ssize_t>(m.bins())});
  std::copy(m.values().begin(), m.values().end(), out.mutable_data());
  return out;
}

StftConfig MakeStft(std::size_t fft_size, std::size_t window_size, std::size_t hop,
                    const std::string& window) {
  StftConfig cfg{fft_size, window_size == 0 ? fft_size : window_size, hop, WindowType::kHann};
  if (window == "rectangular") {
    cfg.window = WindowType::kRectangular;
  } else if (window != "hann") {
    throw Error(ErrorCode::kInvalidArgument, "unknown window '" + window + "'");
  }
  return cfg;
}

ClassVocabulary VocabOrDefault(const std::optional<std::vector<std::string>>& labels) {
  return labels ? ClassVocabulary(*labels) : ClassVocabulary::Default();
}

StemMap ToStems(const std::map<std::string, FloatArray>& stems, int sample_rate) {
  StemMap out;
  for (const auto& [label, samples] : stems) out.emplace(label, ToClip(samples, sample_rate));
  return out;
}

// Tagger/separator backed by Python callables:
//   tag(audio: ndarray, sample_rate: int) -> {class: score}
//   separate(audio: ndarray, sample_rate: int, label: str) -> ndarray
class CallableTagger : public Tagger {
 public:
  CallableTagger(ClassVocabulary vocab, py::function fn)
      : vocab_(std::move(vocab)), fn_(std::move(fn)) {}
  const ClassVocabulary& vocabulary() const override { return vocab_; }
  LabelScores Tag(const AudioClip& clip) const override {
    const auto scores =
        fn_(FromClip(clip), clip.sample_rate()).cast<std::map<std::string, double>>();
    return LabelScores::FromMap(vocab_, scores);
  }

 private:
  ClassVocabulary vocab_;
  py::function fn_;
};

class CallableSeparator : public Separator {
 public:
  explicit CallableSeparator(py::function fn) : fn_(std::move(fn)) {}
  AudioClip Separate(const AudioClip& mixture, const std::string& label) const override {
    AudioClip stem =
        ToClip(fn_(FromClip(mixture), mixture.sample_rate(), label).cast<FloatArray>(),
               mixture.sample_rate());
    if (stem.frame_count() != mixture.frame_count() ||
        stem.channel_count() != mixture.channel_count()) {
      throw Error(ErrorCode::kValidation, "separator returned a stem of the wrong shape for '" +
                                              label + "'");
    }
    return stem;
  }

 private:
  py::function fn_;
};

py::dict TraceToDict(const AgentTrace& trace) {
  py::dict out;
  out["final_labels"] = trace.final_labels;
  out["fallback_fired"] = trace.fallback_fired;
  py::list candidates;
  for (const auto& c : trace.candidates) candidates.append(py::make_tuple(c.label, c.score));
  out["candidates"] = candidates;
  py::list verifications;
  for (const auto& v : trace.verifications) {
    py::dict d;
    d["label"] = v.label;
    d["retag_label"] = v.retag_label ? py::object(py::str(*v.retag_label)) : py::none();
    d["retag_score"] = v.retag_score;
    d["kept"] = v.kept;
    verifications.append(d);
  }
  out["verifications"] = verifications;
  py::dict stems;
  for (const auto& [label, stem] : trace.final_stems) stems[py::str(label)] = FromClip(stem);
  out["final_stems"] = stems;
  return out;
}

}  // namespace
}  // namespace s5kit

PYBIND11_MODULE(_s5kit, m) {
  using namespace s5kit;
  m.doc() = "s5kit core bindings";

  // Raised as s5kit.Error with a `code` attribute naming the error kind.
  static const py::handle error_type =
      py::exception<Error>(m, "Error", PyExc_RuntimeError).release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const std::string code(ErrorCodeName(e.code()));
      py::object exc = py::reinterpret_borrow<py::object>(error_type)(code + ": " + e.what());
      exc.attr("code") = code;
      PyErr_SetObject(error_type.ptr(), exc.ptr());
    }
  });

  m.def("default_vocabulary", [] { return ClassVocabulary::Default().labels(); });

  m.def(
      "read_wav",
      [](const std::string& path) {
        const AudioClip clip = ReadWav(path);
        return py::make_tuple(FromClip(clip), clip.sample_rate());
      },
      py::arg("path"), "Returns (samples, sample_rate); 2-D arrays are (channels, frames).");
  m.def(
      "write_wav",
      [](const std::string& path, const FloatArray& samples, int sample_rate) {
        WriteWav(ToClip(samples, sample_rate), path);
      },
      py::arg("path"), py::arg("samples"), py::arg("sample_rate"));

  m.def(
      "stft_power",
      [](const FloatArray& samples, int sample_rate, std::size_t fft_size,
         std::size_t window_size, std::size_t hop, const std::string& window) {
        return FromMatrix(StftPower(ToClip(samples, sample_rate), 0,
                                    MakeStft(fft_size, window_size, hop, window)));
      },
      py::arg("samples"), py::arg("sample_rate"), py::arg("fft_size") = 1024,
      py::arg("window_size") = 0, py::arg("hop") = 320, py::arg("window") = "hann");

  // Features computed from one STFT of channel 0.
  m.def(
      "features",
      [](const FloatArray& samples, int sample_rate, std::size_t fft_size, std::size_t hop,
         std::size_t n_mels, double kappa, double reference_a4) {
        const FeatureMatrix power =
            StftPower(ToClip(samples, sample_rate), 0, MakeStft(fft_size, 0, hop, "hann"));
        MelConfig mel;
        mel.n_mels = n_mels;
        ChromaConfig chroma;
        chroma.reference_a4 = reference_a4;
        py::dict out;
        out["mel"] = FromMatrix(MelSpectrogram(power, mel));
        out["rolloff"] = FromMatrix(SpectralRolloff(power, {kappa}));
        out["chroma"] = FromMatrix(Chroma(power, chroma));
        return out;
      },
      py::arg("samples"), py::arg("sample_rate"), py::arg("fft_size") = 1024,
      py::arg("hop") = 320, py::arg("n_mels") = 64, py::arg("kappa") = 0.85,
      py::arg("reference_a4") = 440.0);

  m.def(
      "fp_penalized_accuracy",
      [](const LabelSet& pred, const LabelSet& truth,
         const std::optional<std::vector<std::string>>& vocab) {
        return FpPenalizedAccuracy(CountMatches(pred, truth, VocabOrDefault(vocab)));
      },
      py::arg("pred"), py::arg("truth"), py::arg("vocabulary") = py::none());
  m.def("macro_accuracy", &MacroAccuracy, py::arg("pred"), py::arg("truth"));
  m.def("set_accuracy", &SetAccuracy, py::arg("pred"), py::arg("truth"));
  m.def(
      "sdr",
      [](const FloatArray& estimate, const FloatArray& reference, int sample_rate,
         double clamp_db) {
        return Sdr(ToClip(estimate, sample_rate), ToClip(reference, sample_rate),
                   {clamp_db, 0});
      },
      py::arg("estimate"), py::arg("reference"), py::arg("sample_rate") = 32000,
      py::arg("clamp_db") = 100.0);
  m.def(
      "ca_sdri",
      [](const std::map<std::string, FloatArray>& truth,
         const std::map<std::string, FloatArray>& estimates, const FloatArray& mixture,
         int sample_rate) {
        const CaSdriResult r = CaSdri(ToStems(truth, sample_rate), ToStems(estimates, sample_rate),
                                      ToClip(mixture, sample_rate));
        return py::make_tuple(r.mean_db, r.per_class_db);
      },
      py::arg("truth"), py::arg("estimates"), py::arg("mixture"), py::arg("sample_rate") = 32000,
      "Returns (mean_db, {class: improvement_db}).");

  m.def(
      "ensemble_scores",
      [](const std::vector<std::vector<double>>& members, const std::vector<double>& weights,
         const std::optional<std::vector<std::string>>& vocab) {
        const ClassVocabulary v = VocabOrDefault(vocab);
        std::vector<LabelScores> scores;
        for (const auto& s : members) scores.emplace_back(v, s);
        const LabelScores fused = EnsembleScores(scores, weights);
        return std::vector<double>(fused.values().begin(), fused.values().end());
      },
      py::arg("members"), py::arg("weights") = std::vector<double>(kDefaultEnsembleWeights.begin(),
                                                                   kDefaultEnsembleWeights.end()),
      py::arg("vocabulary") = py::none());

  m.def(
      "agent_correct",
      [](const FloatArray& mixture, int sample_rate, py::function tag, py::function separate,
         double threshold, std::size_t top_k, const std::string& rank_by,
         const std::string& empty_fallback, bool reuse_verification_stems,
         const std::optional<std::vector<std::string>>& vocab) {
        AgentConfig cfg;
        cfg.threshold = threshold;
        cfg.top_k = top_k;
        cfg.rank_by = ParseRankBy(rank_by);
        cfg.empty_fallback = ParseEmptyFallback(empty_fallback);
        cfg.reuse_verification_stems = reuse_verification_stems;
        const CallableTagger tagger(VocabOrDefault(vocab), std::move(tag));
        const CallableSeparator separator(std::move(separate));
        const AgentTrace trace = AgentCorrect(ToClip(mixture, sample_rate), tagger, separator, cfg);
        py::dict out = TraceToDict(trace);
        out["baseline"] = BaselinePrediction(trace.original_scores, cfg);
        return out;
      },
      py::arg("mixture"), py::arg("sample_rate"), py::arg("tag"), py::arg("separate"),
      py::arg("threshold") = 0.5, py::arg("top_k") = 3, py::arg("rank_by") = "retag_score",
      py::arg("empty_fallback") = "original_top1", py::arg("reuse_verification_stems") = false,
      py::arg("vocabulary") = py::none());

  m.def(
      "audit",
      [](const std::vector<py::dict>& records, double min_duration) {
        std::vector<SourceRecord> sources;
        for (const auto& r : records) {
          SourceRecord s;
          s.id = r["id"].cast<std::string>();
          s.label = r["class"].cast<std::string>();
          s.duration = r["duration"].cast<double>();
          s.heterogeneous = r.contains("heterogeneous") && r["heterogeneous"].cast<bool>();
          s.added_external = r.contains("added_external") && r["added_external"].cast<bool>();
          sources.push_back(std::move(s));
        }
        py::list out;
        for (const auto& a : AuditCorpus(sources, ClassVocabulary::Default(), min_duration)) {
          py::dict d;
          d["class"] = a.label;
          d["original"] = a.original;
          d["short_removed"] = a.short_removed;
          d["heterogeneous_removed"] = a.heterogeneous_removed;
          d["added"] = a.added;
          d["final"] = a.final_count;
          out.append(d);
        }
        return out;
      },
      py::arg("records"), py::arg("min_duration") = kDefaultMinDuration);

  m.def(
      "make_synthetic_corpus",
      [](const std::string& out_dir, std::size_t clips, std::uint64_t seed, double duration,
         int sample_rate, int min_events, int max_events, std::size_t per_class) {
        const SyntheticPool pool =
            MakeSyntheticPool(ClassVocabulary::Default(), per_class, seed, sample_rate);
        CorpusParams params;
        params.clips = clips;
        params.seed = seed;
        params.duration = duration;
        params.sample_rate = sample_rate;
        params.min_events = min_events;
        params.max_events = max_events;
        params.Validate();
        const auto written = WriteCorpus(PlanCorpus(PoolFromRecords(pool.records), params),
                                         pool.Resolver(), out_dir);
        std::vector<std::string> ids;
        for (const auto& w : written) ids.push_back(w.clip_id);
        return ids;
      },
      py::arg("out_dir"), py::arg("clips") = 10, py::arg("seed") = 0, py::arg("duration") = 4.0,
      py::arg("sample_rate") = 16000, py::arg("min_events") = 1, py::arg("max_events") = 3,
      py::arg("per_class") = 4, "Writes manifest.jsonl and per-clip audio; returns clip ids.");

  m.def(
      "evaluate_corpus",
      [](const std::string& manifest, const std::string& predictions,
         const std::string& corpus_root, const std::string& est_root) {
        const ClassVocabulary& vocab = ClassVocabulary::Default();
        CorpusEvalOptions options;
        options.corpus_root = corpus_root;
        options.est_root = est_root;
        const auto result = EvaluateCorpus(ReadManifest(manifest, vocab),
                                           ReadPredictions(predictions, vocab), vocab, options);
        return py::make_tuple(FormatReportJsonl(result.clips, result.summary), result.warnings);
      },
      py::arg("manifest"), py::arg("predictions"), py::arg("corpus_root"),
      py::arg("est_root") = "", "Returns (report_jsonl, warnings).");
}
