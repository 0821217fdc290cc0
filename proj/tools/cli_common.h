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

#ifndef S5KIT_TOOLS_CLI_COMMON_H_
#define S5KIT_TOOLS_CLI_COMMON_H_

#include <cstdint>
#include <string>
#include <vector>

#include "s5kit/agent.h"
#include "s5kit/error.h"
#include "s5kit/features.h"

namespace s5kit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitBackend = 4;

int ExitCodeFor(ErrorCode code);

struct GlobalOptions {
  int verbosity = 0;
  std::string vocab_file;  // empty: built-in 18-class vocabulary
  std::string effective_config;
};

struct FeaturesOptions {
  std::vector<std::string> inputs;
  std::string out_dir;
  int channel = 0;
  StftConfig stft;
  std::string window = "hann";
  MelConfig mel;
  RolloffConfig rolloff;
  ChromaConfig chroma;
  std::string chroma_norm = "l2";
  bool dump_power = false;
};

struct EvaluateOptions {
  std::string manifest;
  std::string predictions;
  std::string corpus;    // defaults to the manifest's directory
  std::string est_root;  // empty: tags only
  std::string out;       // report.jsonl; empty: stdout table only
  double sdr_clamp = 100.0;
  int channel = 0;
};

struct AgentOptions {
  std::string manifest;
  std::string corpus;
  std::vector<std::string> mixtures;  // used when there is no manifest
  std::string out_dir;
  std::string trace_dir;
  std::vector<std::string> backend_tag;
  std::string backend_sep;
  std::vector<double> weights;
  double timeout_s = 60.0;
  AgentConfig agent;
  std::string rank_by = "retag_score";
  std::string empty_fallback = "original_top1";
  std::string oracle_fallback = "silence";
  int oracle_inject_fp = 0;
  double oracle_fp_score = 0.9;
  double oracle_noise = 0.0;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  bool evaluate = false;
};

struct AuditOptions {
  std::string sources;
  std::string heterogeneous;
  std::string added;
  double min_duration = 1.5;
  std::string out;
};

struct MixOptions {
  std::string out_dir;
  std::string sources;
  std::size_t synthetic_pool = 0;
  std::string noise_list;
  std::string heterogeneous;
  std::string added;
  bool refine = false;
  double min_duration = 1.5;
  std::size_t clips = 10;
  std::uint64_t seed = 0;
  int events = 0;  // 0: use min/max
  int min_events = 1;
  int max_events = 3;
  double snr_min = 5.0;
  double snr_max = 20.0;
  double duration = 10.0;
  int sample_rate = 32000;
  std::string noise = "white:-30";
  std::size_t jobs = 1;
};

int RunFeatures(const GlobalOptions& global, const FeaturesOptions& options);
int RunEvaluate(const GlobalOptions& global, const EvaluateOptions& options);
int RunAgent(const GlobalOptions& global, const AgentOptions& options);
int RunAudit(const GlobalOptions& global, const AuditOptions& options);
int RunMix(const GlobalOptions& global, const MixOptions& options);

// Shared helpers.
ClassVocabulary LoadVocabulary(const GlobalOptions& global);
void EchoConfig(const GlobalOptions& global, const std::string& out_dir);
void Log(const GlobalOptions& global, int level, const std::string& message);
void Warn(const std::string& message);

}  // namespace s5kit::cli

#endif  // S5KIT_TOOLS_CLI_COMMON_H_
