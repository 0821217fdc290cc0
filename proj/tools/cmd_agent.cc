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

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <memory>
#include <mutex>
#include <optional>
#include <random>

#include "cli_common.h"
#include "s5kit/agent.h"
#include "s5kit/dataset.h"
#include "s5kit/external_backend.h"
#include "s5kit/file_util.h"
#include "s5kit/parallel.h"
#include "s5kit/report.h"
#include "s5kit/wav.h"

namespace s5kit::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct ClipInput {
  std::string clip_id;
  std::string mixture_path;
  std::optional<MixtureManifest> manifest;
};

struct ClipOutcome {
  bool ok = false;
  int exit_code = kExitOk;
  std::string error;
  std::optional<AgentTrace> trace;
  LabelSet baseline;
};

// Backends used by one worker. External processes are per worker; oracle
// backends are shared.
struct WorkerBackends {
  std::vector<std::shared_ptr<ExternalBackend>> processes;
  std::shared_ptr<const Tagger> tagger;
  std::shared_ptr<const Separator> separator;
};

std::vector<ClipInput> CollectInputs(const AgentOptions& options,
                                     const ClassVocabulary& vocab,
                                     std::string& corpus_root) {
  std::vector<ClipInput> inputs;
  if (!options.manifest.empty()) {
    corpus_root = options.corpus.empty()
                      ? fs::path(options.manifest).parent_path().string()
                      : options.corpus;
    if (corpus_root.empty()) corpus_root = ".";
    for (auto& m : ReadManifest(options.manifest, vocab)) {
      ClipInput in;
      in.clip_id = m.clip_id;
      in.mixture_path = (fs::path(corpus_root) / m.clip_id / "mixture.wav").string();
      in.manifest = std::move(m);
      inputs.push_back(std::move(in));
    }
  }
  for (const auto& path : options.mixtures) {
    ClipInput in;
    in.clip_id = fs::path(path).stem().string();
    in.mixture_path = path;
    inputs.push_back(std::move(in));
  }
  if (inputs.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no mixtures: pass --manifest or --mixture");
  }
  std::set<std::string> seen;
  for (const auto& in : inputs) {
    if (!seen.insert(in.clip_id).second) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate clip id: " + in.clip_id);
    }
  }
  return inputs;
}

// Extra above-threshold classes per clip for the oracle tagger, drawn from
// the classes absent from the clip's truth.
std::map<std::string, std::map<std::string, double>> InjectFalsePositives(
    const std::vector<ClipInput>& inputs, const ClassVocabulary& vocab,
    const AgentOptions& options) {
  std::map<std::string, std::map<std::string, double>> injected;
  if (options.oracle_inject_fp <= 0) return injected;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const LabelSet truth = inputs[i].manifest->Labels();
    std::vector<std::string> absent;
    for (const auto& name : vocab.labels()) {
      if (!truth.contains(name)) absent.push_back(name);
    }
    std::mt19937_64 rng(options.seed * 0x9E3779B97F4A7C15ULL + i + 1);
    std::shuffle(absent.begin(), absent.end(), rng);
    const std::size_t k =
        std::min(absent.size(), static_cast<std::size_t>(options.oracle_inject_fp));
    for (std::size_t j = 0; j < k; ++j) {
      injected[inputs[i].clip_id][absent[j]] = options.oracle_fp_score;
    }
  }
  return injected;
}

std::shared_ptr<const OracleCorpus> LoadOracleCorpus(const std::vector<ClipInput>& inputs,
                                                     const std::string& corpus_root) {
  std::vector<OracleClip> clips;
  for (const auto& in : inputs) {
    if (!in.manifest) {
      throw Error(ErrorCode::kInvalidArgument,
                  "oracle backends need a manifest; " + in.clip_id + " has none");
    }
    OracleClip clip;
    clip.clip_id = in.clip_id;
    clip.mixture = ReadWav(in.mixture_path);
    for (const auto& label : in.manifest->Labels()) {
      clip.stems.emplace(label, ReadWav((fs::path(corpus_root) / in.clip_id / "stems" /
                                         (label + ".wav"))
                                            .string()));
    }
    clips.push_back(std::move(clip));
  }
  return std::make_shared<const OracleCorpus>(std::move(clips));
}

std::vector<double> EnsembleWeights(const AgentOptions& options) {
  const std::size_t n = options.backend_tag.size();
  if (!options.weights.empty()) {
    if (options.weights.size() != n) {
      throw Error(ErrorCode::kInvalidArgument,
                  "--weights has " + std::to_string(options.weights.size()) +
                      " values for " + std::to_string(n) + " --backend-tag commands");
    }
    return options.weights;
  }
  if (n == kDefaultEnsembleWeights.size()) {
    return {kDefaultEnsembleWeights.begin(), kDefaultEnsembleWeights.end()};
  }
  return std::vector<double>(n, 1.0);
}

std::vector<WorkerBackends> MakeBackends(const AgentOptions& options,
                                         const ClassVocabulary& vocab,
                                         const std::vector<ClipInput>& inputs,
                                         const std::string& corpus_root,
                                         std::size_t workers) {
  std::shared_ptr<const OracleCorpus> corpus;
  const bool need_oracle = options.backend_tag.empty() || options.backend_sep.empty();
  if (need_oracle) corpus = LoadOracleCorpus(inputs, corpus_root);

  std::shared_ptr<const Tagger> oracle_tagger;
  std::shared_ptr<const Separator> oracle_separator;
  if (options.backend_tag.empty()) {
    OracleTaggerOptions topts;
    topts.noise_sigma = options.oracle_noise;
    topts.noise_seed = options.seed;
    topts.injected = InjectFalsePositives(inputs, vocab, options);
    oracle_tagger = MakeOracleTagger(vocab, corpus, topts);
  } else if (options.oracle_inject_fp > 0) {
    Warn("--oracle-inject-fp has no effect with --backend-tag");
  }
  if (options.backend_sep.empty()) {
    oracle_separator = MakeOracleSeparator(corpus, options.oracle_fallback == "mixture"
                                                       ? SeparatorFallback::kMixture
                                                       : SeparatorFallback::kSilence);
  }

  ExternalBackendOptions base;
  base.timeout = std::chrono::milliseconds(
      static_cast<std::int64_t>(options.timeout_s * 1000.0));
  const std::vector<double> weights =
      options.backend_tag.size() > 1 ? EnsembleWeights(options) : std::vector<double>{};

  std::vector<WorkerBackends> backends(workers);
  for (auto& w : backends) {
    if (oracle_tagger) {
      w.tagger = oracle_tagger;
    } else {
      EnsembleConfig ensemble;
      for (const auto& cmd : options.backend_tag) {
        ExternalBackendOptions o = base;
        o.command = cmd;
        auto p = std::make_shared<ExternalBackend>(vocab, o);
        w.processes.push_back(p);
        ensemble.members.push_back(p);
      }
      if (ensemble.members.size() == 1) {
        w.tagger = ensemble.members.front();
      } else {
        ensemble.weights = weights;
        w.tagger = std::make_shared<EnsembleTagger>(std::move(ensemble));
      }
    }
    if (oracle_separator) {
      w.separator = oracle_separator;
    } else {
      ExternalBackendOptions o = base;
      o.command = options.backend_sep;
      auto p = std::make_shared<ExternalBackend>(vocab, o);
      w.processes.push_back(p);
      w.separator = p;
    }
  }
  return backends;
}

void WriteStems(const StemMap& stems, const fs::path& dir) {
  for (const auto& [label, stem] : stems) {
    WriteWav(stem, (dir / "stems" / (label + ".wav")).string());
  }
}

std::string JsonLines(const std::vector<json>& records) {
  std::string out;
  for (const auto& r : records) out += r.dump() + "\n";
  return out;
}

}  // namespace

int RunAgent(const GlobalOptions& global, const AgentOptions& options) {
  const ClassVocabulary vocab = LoadVocabulary(global);
  AgentConfig config = options.agent;
  config.rank_by = ParseRankBy(options.rank_by);
  config.empty_fallback = ParseEmptyFallback(options.empty_fallback);
  config.Validate();
  if (options.out_dir.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "--out is required");
  }
  if (options.evaluate && options.manifest.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "--evaluate needs --manifest");
  }

  std::string corpus_root;
  const std::vector<ClipInput> inputs = CollectInputs(options, vocab, corpus_root);
  const std::size_t workers = std::max<std::size_t>(1, std::min(options.jobs, inputs.size()));
  const std::vector<WorkerBackends> backends =
      MakeBackends(options, vocab, inputs, corpus_root, workers);

  const fs::path out(options.out_dir);
  const fs::path trace_dir =
      options.trace_dir.empty() ? out / "traces" : fs::path(options.trace_dir);
  fs::create_directories(out);
  fs::create_directories(trace_dir);

  std::vector<ClipOutcome> outcomes(inputs.size());
  std::mutex log_mu;
  ParallelFor(inputs.size(), workers, [&](std::size_t i, std::size_t worker) {
    const ClipInput& in = inputs[i];
    ClipOutcome& result = outcomes[i];
    const WorkerBackends& b = backends[worker];
    try {
      const AudioClip mixture = ReadWav(in.mixture_path);
      result.trace = AgentCorrect(mixture, *b.tagger, *b.separator, config);
      result.baseline = BaselinePrediction(result.trace->original_scores, config);
      WriteStems(result.trace->final_stems, out / in.clip_id);
      WriteFileAtomic((trace_dir / (in.clip_id + ".json")).string(),
                      TraceToJson(in.clip_id, *result.trace).dump(2) + "\n");
      if (options.evaluate) {
        StemMap pre;
        for (const auto& label : result.baseline) {
          pre.emplace(label, b.separator->Separate(mixture, label));
        }
        WriteStems(pre, out / "pre" / in.clip_id);
      }
      result.ok = true;
    } catch (const Error& e) {
      result.exit_code = ExitCodeFor(e.code());
      result.error = std::string(ErrorCodeName(e.code())) + ": " + e.what();
    } catch (const std::exception& e) {
      result.exit_code = kExitData;
      result.error = e.what();
    }
    std::lock_guard<std::mutex> lock(log_mu);
    if (!result.ok) {
      std::cerr << "error: " << in.clip_id << ": " << result.error << "\n";
    } else {
      Log(global, 1, in.clip_id + ": " + std::to_string(result.trace->final_labels.size()) +
                         " labels");
    }
  });

  std::vector<Prediction> post;
  std::vector<Prediction> pre;
  std::vector<json> failures;
  int exit_code = kExitOk;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const ClipOutcome& o = outcomes[i];
    if (!o.ok) {
      failures.push_back({{"clip_id", inputs[i].clip_id}, {"error", o.error}});
      exit_code = std::max(exit_code, o.exit_code);
      continue;
    }
    post.push_back({inputs[i].clip_id, o.trace->FinalSet()});
    pre.push_back({inputs[i].clip_id, o.baseline});
  }
  WritePredictions(post, (out / "predictions.jsonl").string());
  WritePredictions(pre, (out / "predictions_pre.jsonl").string());
  WriteFileAtomic((out / "failures.jsonl").string(), JsonLines(failures));

  json summary = {{"clips", inputs.size()},
                  {"failed", failures.size()},
                  {"threshold", config.threshold},
                  {"top_k", config.top_k},
                  {"rank_by", RankByName(config.rank_by)},
                  {"empty_fallback", EmptyFallbackName(config.empty_fallback)}};
  std::size_t fallbacks = 0;
  std::size_t candidates_dropped = 0;
  for (const auto& o : outcomes) {
    if (!o.ok) continue;
    fallbacks += o.trace->fallback_fired ? 1 : 0;
    for (const auto& v : o.trace->verifications) candidates_dropped += v.kept ? 0 : 1;
  }
  summary["fallbacks"] = fallbacks;
  summary["candidates_dropped"] = candidates_dropped;

  if (!options.manifest.empty()) {
    // Tag-level comparison against the manifest truth.
    std::vector<ClipEval> pre_evals;
    std::vector<ClipEval> post_evals;
    std::size_t acc3_drops = 0;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      if (!outcomes[i].ok) continue;
      const LabelSet truth = inputs[i].manifest->Labels();
      pre_evals.push_back(EvaluateTags(inputs[i].clip_id, outcomes[i].baseline, truth, vocab));
      post_evals.push_back(
          EvaluateTags(inputs[i].clip_id, outcomes[i].trace->FinalSet(), truth, vocab));
      if (post_evals.back().fp_penalized < pre_evals.back().fp_penalized) ++acc3_drops;
    }
    const CorpusSummary s_pre = Summarize(pre_evals);
    const CorpusSummary s_post = Summarize(post_evals);
    summary["pre"] = SummaryToJson(s_pre);
    summary["post"] = SummaryToJson(s_post);
    summary["acc3_not_decreased"] = s_post.fp_penalized >= s_pre.fp_penalized;
    summary["clips_acc3_decreased"] = acc3_drops;
    if (!(s_post.fp_penalized >= s_pre.fp_penalized)) {
      Warn("post-agent Acc3 is below the pre-agent value");
    }
  }
  WriteFileAtomic((out / "agent_summary.json").string(), summary.dump(2) + "\n");

  if (options.evaluate) {
    const auto manifests = ReadManifest(options.manifest, vocab);
    std::vector<MixtureManifest> ok_manifests;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      if (outcomes[i].ok) ok_manifests.push_back(manifests[i]);
    }
    CorpusEvalOptions eval;
    eval.corpus_root = corpus_root;
    const std::pair<const char*, const std::vector<Prediction>*> stages[] = {
        {"pre", &pre}, {"post", &post}};
    for (const auto& [stage, preds] : stages) {
      const bool is_pre = std::string(stage) == "pre";
      eval.est_root = (is_pre ? out / "pre" : out).string();
      const CorpusEvalResult r = EvaluateCorpus(ok_manifests, *preds, vocab, eval);
      for (const auto& w : r.warnings) Warn(w);
      WriteFileAtomic((out / (is_pre ? "report_pre.jsonl" : "report.jsonl")).string(),
                      FormatReportJsonl(r.clips, r.summary));
      std::cout << (is_pre ? "pre-agent\n" : "post-agent\n")
                << FormatReportTable({SummaryToJson(r.summary)});
    }
  }

  EchoConfig(global, options.out_dir);
  return exit_code;
}

}  // namespace s5kit::cli
