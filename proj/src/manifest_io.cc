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
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "s5kit/dataset.h"
#include "s5kit/error.h"
#include "s5kit/file_util.h"
#include "s5kit/wav.h"

namespace s5kit {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr char kManifestFormat[] = "s5kit-manifest";
constexpr int kManifestVersion = 1;

json ManifestToJson(const MixtureManifest& m) {
  json events = json::array();
  for (const auto& e : m.events) {
    events.push_back({{"source_id", e.source_id},
                      {"class", e.label},
                      {"onset", e.onset},
                      {"snr_db", e.snr_db}});
  }
  return {{"clip_id", m.clip_id},
          {"duration", m.duration},
          {"sample_rate", m.sample_rate},
          {"seed", m.seed},
          {"noise", m.noise},
          {"normalization_gain", m.normalization_gain},
          {"events", events}};
}

template <typename T>
T Field(const json& obj, const char* key) {
  if (!obj.contains(key)) throw std::runtime_error(std::string("missing field '") + key + "'");
  return obj.at(key).get<T>();
}

MixtureManifest ManifestFromJson(const json& j, const ClassVocabulary& vocab) {
  MixtureManifest m;
  m.clip_id = Field<std::string>(j, "clip_id");
  m.duration = Field<double>(j, "duration");
  m.sample_rate = Field<int>(j, "sample_rate");
  m.seed = j.value("seed", std::uint64_t{0});
  m.noise = j.value("noise", std::string("white:-30"));
  m.normalization_gain = j.value("normalization_gain", 1.0);
  for (const auto& e : Field<json>(j, "events")) {
    MixtureEvent event;
    event.source_id = Field<std::string>(e, "source_id");
    event.label = Field<std::string>(e, "class");
    event.onset = Field<double>(e, "onset");
    event.snr_db = Field<double>(e, "snr_db");
    vocab.index(event.label);
    m.events.push_back(std::move(event));
  }
  m.Validate(false);
  return m;
}

}  // namespace

std::string FormatManifest(const std::vector<MixtureManifest>& manifests) {
  std::string out =
      json{{"format", kManifestFormat}, {"version", kManifestVersion}}.dump() + "\n";
  for (const auto& m : manifests) out += ManifestToJson(m).dump() + "\n";
  return out;
}

void WriteManifest(const std::vector<MixtureManifest>& manifests, const std::string& path) {
  WriteFileAtomic(path, FormatManifest(manifests));
}

std::vector<MixtureManifest> ParseManifest(const std::string& text,
                                           const ClassVocabulary& vocab) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool have_header = false;
  std::vector<MixtureManifest> out;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      if (!have_header) {
        if (!j.is_object() || j.value("format", std::string()) != kManifestFormat) {
          throw std::runtime_error("expected manifest header line");
        }
        if (j.value("version", 0) != kManifestVersion) {
          throw std::runtime_error("unsupported manifest version " +
                                   std::to_string(j.value("version", 0)));
        }
        have_header = true;
        continue;
      }
      out.push_back(ManifestFromJson(j, vocab));
    } catch (const Error& e) {
      throw Error(e.code(), "manifest line " + std::to_string(line_no) + ": " + e.what());
    } catch (const std::exception& e) {
      throw Error(ErrorCode::kParse,
                  "manifest line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!have_header) throw Error(ErrorCode::kParse, "manifest line 1: missing header");
  return out;
}

std::vector<MixtureManifest> ReadManifest(const std::string& path,
                                          const ClassVocabulary& vocab) {
  try {
    return ParseManifest(ReadFileToString(path), vocab);
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

std::vector<SourceRecord> ReadSourceList(const std::string& path,
                                         const ClassVocabulary& vocab) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kUnreadableFile, "cannot open source list " + path);
  const fs::path base = fs::path(path).parent_path();
  std::vector<SourceRecord> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      SourceRecord r;
      r.id = Field<std::string>(j, "id");
      r.label = Field<std::string>(j, "class");
      r.path = j.value("path", std::string());
      if (!r.path.empty() && fs::path(r.path).is_relative()) r.path = (base / r.path).string();
      r.heterogeneous = j.value("heterogeneous", false);
      r.added_external = j.value("added_external", false);
      vocab.index(r.label);
      if (j.contains("duration")) {
        r.duration = j.at("duration").get<double>();
      } else if (!r.path.empty()) {
        r.duration = ReadWav(r.path).duration_seconds();
      }
      if (!(r.duration > 0.0)) throw std::runtime_error("duration must be positive");
      out.push_back(std::move(r));
    } catch (const Error& e) {
      throw Error(e.code(), path + ": line " + std::to_string(line_no) + ": " + e.what());
    } catch (const std::exception& e) {
      throw Error(ErrorCode::kParse,
                  path + ": line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

void WriteSourceList(const std::vector<SourceRecord>& records, const std::string& path) {
  std::string out;
  for (const auto& r : records) {
    json j = {{"id", r.id}, {"class", r.label}, {"path", r.path}, {"duration", r.duration}};
    if (r.heterogeneous) j["heterogeneous"] = true;
    if (r.added_external) j["added_external"] = true;
    out += j.dump() + "\n";
  }
  WriteFileAtomic(path, out);
}

std::set<std::string> ReadIdList(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kUnreadableFile, "cannot open id list " + path);
  std::set<std::string> ids;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t\r");
    ids.insert(line.substr(first, last - first + 1));
  }
  return ids;
}

void ApplyFlags(std::vector<SourceRecord>& records, const std::set<std::string>& heterogeneous,
                const std::set<std::string>& added) {
  std::set<std::string> known;
  for (auto& r : records) {
    known.insert(r.id);
    if (heterogeneous.count(r.id)) r.heterogeneous = true;
    if (added.count(r.id)) r.added_external = true;
  }
  for (const auto* ids : {&heterogeneous, &added}) {
    for (const auto& id : *ids) {
      if (!known.count(id)) {
        throw Error(ErrorCode::kValidation, "flag file names unknown source id '" + id + "'");
      }
    }
  }
}

}  // namespace s5kit
