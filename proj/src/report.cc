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

#include "s5kit/report.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "s5kit/error.h"
#include "s5kit/file_util.h"
#include "s5kit/wav.h"

namespace s5kit {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<Prediction> ReadPredictions(const std::string& path,
                                        const ClassVocabulary& vocab) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kUnreadableFile, "cannot open predictions " + path);
  std::vector<Prediction> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      Prediction p;
      p.clip_id = j.at("clip_id").get<std::string>();
      for (const auto& label : j.at("labels")) p.labels.insert(label.get<std::string>());
      ValidateLabels(p.labels, vocab);
      out.push_back(std::move(p));
    } catch (const Error& e) {
      throw Error(e.code(), path + ": line " + std::to_string(line_no) + ": " + e.what());
    } catch (const std::exception& e) {
      throw Error(ErrorCode::kParse,
                  path + ": line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

void WritePredictions(const std::vector<Prediction>& predictions, const std::string& path) {
  std::string out;
  for (const auto& p : predictions) {
    out += json{{"clip_id", p.clip_id}, {"labels", p.labels}}.dump() + "\n";
  }
  WriteFileAtomic(path, out);
}

json ClipEvalToJson(const ClipEval& eval) {
  json j = {{"type", "clip"},
            {"clip_id", eval.clip_id},
            {"acc1", eval.set_accuracy},
            {"acc2", eval.macro_accuracy},
            {"acc3", eval.fp_penalized},
            {"ca_sdri", eval.ca_sdri ? json(*eval.ca_sdri) : json()},
            {"per_class_sdri", eval.per_class_sdri}};
  return j;
}

json SummaryToJson(const CorpusSummary& summary) {
  return {{"type", "summary"},
          {"clips", summary.clips},
          {"acc1", summary.set_accuracy},
          {"acc2", summary.macro_accuracy},
          {"acc3", summary.fp_penalized},
          {"ca_sdri", summary.ca_sdri ? json(*summary.ca_sdri) : json()}};
}

std::string FormatReportJsonl(const std::vector<ClipEval>& clips,
                              const CorpusSummary& summary) {
  std::string out;
  for (const auto& clip : clips) out += ClipEvalToJson(clip).dump() + "\n";
  out += SummaryToJson(summary).dump() + "\n";
  return out;
}

std::string FormatReportTable(const std::vector<json>& records) {
  std::ostringstream out;
  char line[200];
  std::snprintf(line, sizeof(line), "%-24s %8s %8s %8s %10s\n", "clip", "Acc1", "Acc2",
                "Acc3", "CA-SDRi");
  out << line;
  for (const auto& r : records) {
    const bool summary = r.value("type", std::string()) == "summary";
    const std::string name = summary ? "MEAN (" + std::to_string(r.value("clips", 0)) + " clips)"
                                     : r.value("clip_id", std::string("?"));
    char sdr[32] = "-";
    if (r.contains("ca_sdri") && r["ca_sdri"].is_number()) {
      std::snprintf(sdr, sizeof(sdr), "%.3f", r["ca_sdri"].get<double>());
    }
    // Accuracies as percentages, matching how tagging results are usually tabulated.
    std::snprintf(line, sizeof(line), "%-24s %8.2f %8.2f %8.2f %10s\n", name.c_str(),
                  100.0 * r.value("acc1", 0.0), 100.0 * r.value("acc2", 0.0),
                  100.0 * r.value("acc3", 0.0), sdr);
    out << line;
  }
  return out.str();
}

CorpusEvalResult EvaluateCorpus(const std::vector<MixtureManifest>& manifests,
                                const std::vector<Prediction>& predictions,
                                const ClassVocabulary& vocab,
                                const CorpusEvalOptions& options) {
  std::map<std::string, const Prediction*> by_id;
  std::vector<std::string> problems;
  for (const auto& p : predictions) {
    if (!by_id.emplace(p.clip_id, &p).second) {
      problems.push_back("duplicate prediction for clip '" + p.clip_id + "'");
    }
  }
  std::set<std::string> manifest_ids;
  for (const auto& m : manifests) {
    manifest_ids.insert(m.clip_id);
    if (!by_id.count(m.clip_id)) problems.push_back("no prediction for clip '" + m.clip_id + "'");
  }
  for (const auto& [id, p] : by_id) {
    if (!manifest_ids.count(id)) problems.push_back("prediction for unknown clip '" + id + "'");
  }
  if (!problems.empty()) {
    std::string message = std::to_string(problems.size()) + " clip id mismatch(es):";
    for (const auto& p : problems) message += "\n  " + p;
    throw Error(ErrorCode::kValidation, message);
  }

  CorpusEvalResult result;
  for (const auto& m : manifests) {
    const Prediction& pred = *by_id.at(m.clip_id);
    ClipEval eval = EvaluateTags(m.clip_id, pred.labels, m.Labels(), vocab);
    if (!options.est_root.empty()) {
      const fs::path truth_dir = fs::path(options.corpus_root) / m.clip_id;
      const fs::path est_dir = fs::path(options.est_root) / m.clip_id / "stems";
      const AudioClip mixture = ReadWav((truth_dir / "mixture.wav").string());
      StemMap truth, est;
      for (const auto& label : m.Labels()) {
        truth.emplace(label, ReadWav((truth_dir / "stems" / (label + ".wav")).string()));
      }
      std::vector<std::string> missing;
      for (const auto& label : pred.labels) {
        const fs::path stem = est_dir / (label + ".wav");
        if (fs::exists(stem)) {
          est.emplace(label, ReadWav(stem.string()));
        } else {
          missing.push_back(label);
          result.warnings.push_back("clip '" + m.clip_id + "': no estimated stem for '" +
                                    label + "', scored as a false positive");
        }
      }
      std::map<std::string, double> per_class;
      if (!truth.empty() || !est.empty()) per_class = CaSdri(truth, est, mixture, options.sdr).per_class_db;
      for (const auto& label : missing) per_class.emplace(label, 0.0);
      if (!per_class.empty()) {
        double sum = 0.0;
        for (const auto& [label, v] : per_class) sum += v;
        eval.ca_sdri = sum / static_cast<double>(per_class.size());
      }
      eval.per_class_sdri = std::move(per_class);
    }
    result.clips.push_back(std::move(eval));
  }
  result.summary = Summarize(result.clips);
  return result;
}

}  // namespace s5kit
