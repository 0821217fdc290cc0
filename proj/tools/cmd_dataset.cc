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

#include <filesystem>
#include <iostream>
#include <memory>

#include "cli_common.h"
#include "s5kit/dataset.h"
#include "s5kit/file_util.h"
#include "s5kit/wav.h"

namespace s5kit::cli {
namespace {

namespace fs = std::filesystem;

std::vector<SourceRecord> LoadSources(const std::string& path, const std::string& hetero,
                                      const std::string& added,
                                      const ClassVocabulary& vocab) {
  std::vector<SourceRecord> records = ReadSourceList(path, vocab);
  ApplyFlags(records, hetero.empty() ? std::set<std::string>{} : ReadIdList(hetero),
             added.empty() ? std::set<std::string>{} : ReadIdList(added));
  return records;
}

}  // namespace

int RunAudit(const GlobalOptions& global, const AuditOptions& options) {
  const ClassVocabulary vocab = LoadVocabulary(global);
  const auto records =
      LoadSources(options.sources, options.heterogeneous, options.added, vocab);
  const auto rows = AuditCorpus(records, vocab, options.min_duration);
  if (!options.out.empty()) {
    std::string jsonl;
    for (const auto& r : rows) {
      jsonl += nlohmann::json{{"class", r.label},
                              {"original", r.original},
                              {"short_removed", r.short_removed},
                              {"heterogeneous_removed", r.heterogeneous_removed},
                              {"added", r.added},
                              {"final", r.final_count}}
                   .dump() +
               "\n";
    }
    WriteFileAtomic(options.out, jsonl);
    EchoConfig(global, fs::path(options.out).parent_path().string());
  }
  std::cout << FormatAuditTable(rows);
  return kExitOk;
}

int RunMix(const GlobalOptions& global, const MixOptions& options) {
  const ClassVocabulary vocab = LoadVocabulary(global);
  CorpusParams params;
  params.clips = options.clips;
  params.seed = options.seed;
  params.duration = options.duration;
  params.sample_rate = options.sample_rate;
  params.min_events = options.events > 0 ? options.events : options.min_events;
  params.max_events = options.events > 0 ? options.events : options.max_events;
  params.snr_min_db = options.snr_min;
  params.snr_max_db = options.snr_max;
  params.noise = options.noise;
  params.Validate();

  const fs::path out(options.out_dir);
  std::vector<SourceRecord> records;
  SourceResolver sources;
  if (options.synthetic_pool > 0) {
    if (!options.sources.empty()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "--sources and --synthetic-pool are mutually exclusive");
    }
    auto pool = std::make_shared<SyntheticPool>(
        MakeSyntheticPool(vocab, options.synthetic_pool, options.seed, options.sample_rate));
    // Keep the generated sources next to the corpus so it can be rebuilt from files.
    for (auto& r : pool->records) {
      r.path = (out / "sources" / (r.id + ".wav")).string();
      WriteWav(pool->audio.at(r.id), r.path);
    }
    WriteSourceList(pool->records, (out / "sources.jsonl").string());
    records = pool->records;
    sources = pool->Resolver();
  } else if (!options.sources.empty()) {
    records = LoadSources(options.sources, options.heterogeneous, options.added, vocab);
    sources = FileResolver(records);
  } else {
    throw Error(ErrorCode::kInvalidArgument, "pass --sources or --synthetic-pool");
  }
  if (options.refine) records = RefinedPool(records, options.min_duration);

  SourcePool pool = PoolFromRecords(records);
  SourceResolver resolver = sources;
  if (!options.noise_list.empty()) {
    const fs::path base = fs::path(options.noise_list).parent_path();
    auto noise_paths = std::make_shared<std::map<std::string, std::string>>();
    for (const auto& entry : ReadIdList(options.noise_list)) {
      const fs::path p = fs::path(entry).is_absolute() ? fs::path(entry) : base / entry;
      (*noise_paths)[entry] = p.string();
      pool.noise_ids.push_back(entry);
    }
    resolver = [sources, noise_paths](const std::string& id) {
      auto it = noise_paths->find(id);
      return it != noise_paths->end() ? ReadWav(it->second) : sources(id);
    };
  }

  const auto plan = PlanCorpus(pool, params);
  const auto written = WriteCorpus(plan, resolver, out.string(), options.jobs);
  std::size_t normalized = 0;
  for (const auto& m : written) normalized += m.normalization_gain != 1.0 ? 1 : 0;
  Log(global, 0,
      "wrote " + std::to_string(written.size()) + " clips to " + out.string() + " (" +
          std::to_string(normalized) + " peak-normalised)");
  EchoConfig(global, options.out_dir);
  return kExitOk;
}

}  // namespace s5kit::cli
