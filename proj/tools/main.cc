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

// s5kit command-line entry point.
//
//   s5kit features  WAV... --out DIR
//   s5kit evaluate  --manifest M --predictions P [--est-root DIR]
//   s5kit agent     --manifest M --out DIR [--backend-tag CMD ...] [--backend-sep CMD]
//   s5kit dataset audit --sources LIST [--heterogeneous IDS] [--added IDS]
//   s5kit dataset mix   --out DIR (--sources LIST | --synthetic-pool N)
//
// Exit codes: 0 success, 2 usage, 3 data, 4 backend.

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

#include "cli_common.h"

namespace {

using namespace s5kit::cli;

void AddFeatures(CLI::App& app, FeaturesOptions& o) {
  app.add_option("inputs", o.inputs, "Input WAV files")->required();
  app.add_option("-o,--out", o.out_dir, "Output directory")->required();
  app.add_option("--channel", o.channel, "Channel to analyse")->capture_default_str();
  app.add_option("--fft-size", o.stft.fft_size, "FFT size (power of two)")
      ->capture_default_str();
  app.add_option("--window-size", o.stft.window_size, "Analysis window length")
      ->capture_default_str();
  app.add_option("--hop", o.stft.hop_size, "Hop size in samples")->capture_default_str();
  app.add_option("--window", o.window, "Window type")
      ->check(CLI::IsMember({"hann", "rectangular"}))
      ->capture_default_str();
  app.add_option("--n-mels", o.mel.n_mels, "Mel bands")->capture_default_str();
  app.add_option("--fmin", o.mel.fmin, "Lowest mel edge (Hz)")->capture_default_str();
  app.add_option("--fmax", o.mel.fmax, "Highest mel edge (Hz), 0 for Nyquist")
      ->capture_default_str();
  app.add_option("--kappa", o.rolloff.kappa, "Roll-off energy fraction")
      ->capture_default_str();
  app.add_option("--tuning", o.chroma.reference_a4, "Reference A4 frequency (Hz)")
      ->capture_default_str();
  app.add_option("--chroma-norm", o.chroma_norm, "Chroma normalisation")
      ->check(CLI::IsMember({"l2", "none"}))
      ->capture_default_str();
  app.add_flag("--dump-power", o.dump_power, "Also write the power spectrogram");
}

void AddEvaluate(CLI::App& app, EvaluateOptions& o) {
  app.add_option("--manifest", o.manifest, "Corpus manifest")->required()->check(CLI::ExistingFile);
  app.add_option("--predictions", o.predictions, "Predicted label sets (JSONL)")
      ->required()
      ->check(CLI::ExistingFile);
  app.add_option("--corpus", o.corpus, "Corpus root (default: manifest directory)");
  app.add_option("--est-root", o.est_root, "Estimated stems root; omit for tags only");
  app.add_option("-o,--out", o.out, "Report file (JSONL)");
  app.add_option("--sdr-clamp", o.sdr_clamp, "SDR clamp (dB)")->capture_default_str();
  app.add_option("--channel", o.channel, "Channel to score")->capture_default_str();
}

void AddAgent(CLI::App& app, AgentOptions& o) {
  app.add_option("--manifest", o.manifest, "Corpus manifest")->check(CLI::ExistingFile);
  app.add_option("--corpus", o.corpus, "Corpus root (default: manifest directory)");
  app.add_option("--mixture", o.mixtures, "Extra mixture WAV (no ground truth)")
      ->check(CLI::ExistingFile);
  app.add_option("-o,--out", o.out_dir, "Output directory")->required();
  app.add_option("--trace-dir", o.trace_dir, "Trace directory (default: OUT/traces)");
  app.add_option("--backend-tag", o.backend_tag,
                 "External tagger command; repeat to form an ensemble (default: oracle)");
  app.add_option("--backend-sep", o.backend_sep, "External separator command (default: oracle)");
  app.add_option("--weights", o.weights, "Ensemble weights, one per --backend-tag")
      ->delimiter(',');
  app.add_option("--timeout", o.timeout_s, "Backend response timeout (s)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--threshold", o.agent.threshold, "Candidate score threshold")
      ->capture_default_str();
  app.add_option("--top-k", o.agent.top_k, "Candidates taken regardless of score")
      ->capture_default_str();
  app.add_option("--rank-by", o.rank_by, "Ranking of verified labels")
      ->check(CLI::IsMember({"retag_score", "original_score"}))
      ->capture_default_str();
  app.add_option("--empty-fallback", o.empty_fallback, "Result when every candidate fails")
      ->check(CLI::IsMember({"original_top1", "original_topk"}))
      ->capture_default_str();
  app.add_flag("--reuse-verification-stems", o.agent.reuse_verification_stems,
               "Keep verification stems instead of separating again");
  app.add_option("--oracle-fallback", o.oracle_fallback,
                 "Oracle separator output for absent classes")
      ->check(CLI::IsMember({"silence", "mixture"}))
      ->capture_default_str();
  app.add_option("--oracle-inject-fp", o.oracle_inject_fp,
                 "False-positive classes injected per clip into the oracle tagger")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  app.add_option("--oracle-fp-score", o.oracle_fp_score, "Score of injected classes")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  app.add_option("--oracle-noise", o.oracle_noise, "Oracle tagger score noise (sigma)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  app.add_option("--seed", o.seed, "Seed for oracle noise and injection")->capture_default_str();
  app.add_option("-j,--jobs", o.jobs, "Parallel clips")->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_flag("--evaluate", o.evaluate, "Score pre- and post-agent outputs");
}

void AddAudit(CLI::App& app, AuditOptions& o) {
  app.add_option("--sources", o.sources, "Source list (JSONL)")->required()->check(CLI::ExistingFile);
  app.add_option("--heterogeneous", o.heterogeneous, "Ids flagged heterogeneous")
      ->check(CLI::ExistingFile);
  app.add_option("--added", o.added, "Ids of externally added sources")->check(CLI::ExistingFile);
  app.add_option("--min-duration", o.min_duration, "Shortest kept source (s)")
      ->capture_default_str();
  app.add_option("-o,--out", o.out, "Audit rows (JSONL)");
}

void AddMix(CLI::App& app, MixOptions& o) {
  app.add_option("-o,--out", o.out_dir, "Corpus directory")->required();
  app.add_option("--sources", o.sources, "Source list (JSONL)")->check(CLI::ExistingFile);
  app.add_option("--synthetic-pool", o.synthetic_pool, "Generate N procedural sources per class");
  app.add_option("--noise-list", o.noise_list, "Background WAV paths, one per line")
      ->check(CLI::ExistingFile);
  app.add_option("--heterogeneous", o.heterogeneous, "Ids flagged heterogeneous")
      ->check(CLI::ExistingFile);
  app.add_option("--added", o.added, "Ids of externally added sources")->check(CLI::ExistingFile);
  app.add_flag("--refine", o.refine, "Drop short and heterogeneous sources first");
  app.add_option("--min-duration", o.min_duration, "Shortest kept source (s)")
      ->capture_default_str();
  app.add_option("-n,--clips", o.clips, "Number of mixtures")->capture_default_str();
  app.add_option("--seed", o.seed, "Corpus seed")->capture_default_str();
  app.add_option("--events", o.events, "Exact events per clip")->check(CLI::Range(1, 3));
  app.add_option("--min-events", o.min_events, "Fewest events per clip")
      ->check(CLI::Range(1, 3))
      ->capture_default_str();
  app.add_option("--max-events", o.max_events, "Most events per clip")
      ->check(CLI::Range(1, 3))
      ->capture_default_str();
  app.add_option("--snr-min", o.snr_min, "Lowest event SNR (dB)")->capture_default_str();
  app.add_option("--snr-max", o.snr_max, "Highest event SNR (dB)")->capture_default_str();
  app.add_option("--duration", o.duration, "Clip length (s)")->capture_default_str();
  app.add_option("--sample-rate", o.sample_rate, "Sample rate (Hz)")->capture_default_str();
  app.add_option("--noise", o.noise, "Background: white:<dBFS> or a noise id")
      ->capture_default_str();
  app.add_option("-j,--jobs", o.jobs, "Parallel clips")->check(CLI::PositiveNumber)
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"s5kit: tagging, separation and evaluation tools for sound scene mixtures"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML config file; command-line flags take precedence");

  GlobalOptions global;
  app.add_flag("-v,--verbose", global.verbosity, "Increase log detail");
  app.add_option("--vocab", global.vocab_file, "Class list, one per line")
      ->check(CLI::ExistingFile);

  FeaturesOptions features;
  EvaluateOptions evaluate;
  AgentOptions agent;
  AuditOptions audit;
  MixOptions mix;

  auto* features_cmd = app.add_subcommand("features", "Dump mel, roll-off and chroma matrices");
  AddFeatures(*features_cmd, features);
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score predictions against a corpus");
  AddEvaluate(*evaluate_cmd, evaluate);
  auto* agent_cmd = app.add_subcommand("agent", "Run agent-based label correction");
  AddAgent(*agent_cmd, agent);
  auto* dataset_cmd = app.add_subcommand("dataset", "Source pool audit and mixture synthesis");
  dataset_cmd->require_subcommand(1);
  auto* audit_cmd = dataset_cmd->add_subcommand("audit", "Per-class refinement counts");
  AddAudit(*audit_cmd, audit);
  auto* mix_cmd = dataset_cmd->add_subcommand("mix", "Synthesize a mixture corpus");
  AddMix(*mix_cmd, mix);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }
  // Echo only the global options and those of the subcommand that ran, in a
  // form --config accepts.
  std::string active;
  for (CLI::App* sub = &app; !sub->get_subcommands().empty();) {
    sub = sub->get_subcommands().front();
    active += sub->get_name() + ".";
  }
  std::istringstream all(app.config_to_str(true, false));
  for (std::string line; std::getline(all, line);) {
    const auto eq = line.find('=');
    const std::string key = line.substr(0, eq);
    const bool unset = line.size() >= 3 && line.compare(line.size() - 3, 3, "=\"\"") == 0;
    if (!unset && (key.find('.') == std::string::npos || key.rfind(active, 0) == 0)) {
      global.effective_config += line + "\n";
    }
  }

  try {
    if (*features_cmd) return RunFeatures(global, features);
    if (*evaluate_cmd) return RunEvaluate(global, evaluate);
    if (*agent_cmd) return RunAgent(global, agent);
    if (*audit_cmd) return RunAudit(global, audit);
    if (*mix_cmd) return RunMix(global, mix);
  } catch (const s5kit::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ExitCodeFor(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
