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

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "s5kit/dataset.h"
#include "s5kit/feature_io.h"
#include "s5kit/file_util.h"
#include "s5kit/report.h"
#include "s5kit/wav.h"
#include "refinement_fixture.h"
#include "test_util.h"

namespace s5kit {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using testing::TempDir;

struct RunResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr
};

RunResult RunCli(const TempDir& dir, const std::string& args) {
  const std::string log = dir / "cli.log";
  const std::string cmd = std::string(S5KIT_CLI) + " " + args + " > " + log + " 2>&1";
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.output = ReadFileToString(log);
  return r;
}

std::vector<json> ReadJsonl(const std::string& path) {
  std::vector<json> out;
  std::istringstream in(ReadFileToString(path));
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) out.push_back(json::parse(line));
  }
  return out;
}

std::string MakeCorpus(const TempDir& dir, int clips, int seed, const std::string& name = "corpus") {
  const auto r = RunCli(dir, "dataset mix -o " + (dir / name) + " --synthetic-pool 2 -n " +
                              std::to_string(clips) + " --seed " + std::to_string(seed) +
                              " --duration 3 --sample-rate 16000");
  EXPECT_EQ(r.exit_code, 0) << r.output;
  return dir / (name + "/manifest.jsonl");
}

TEST(CliTest, NoSubcommandIsUsageError) {
  TempDir dir;
  EXPECT_EQ(RunCli(dir, "").exit_code, 2);
  EXPECT_EQ(RunCli(dir, "bogus").exit_code, 2);
  EXPECT_EQ(RunCli(dir, "--help").exit_code, 0);
}

TEST(CliTest, FeaturesWritesThreeMatrices) {
  TempDir dir;
  WriteWav(testing::Noise(16000, 1, 16000), dir / "clip.wav");
  const auto r = RunCli(dir, "features " + (dir / "clip.wav") + " -o " + (dir / "out"));
  ASSERT_EQ(r.exit_code, 0) << r.output;
  for (const char* kind : {"mel", "rolloff", "chroma"}) {
    EXPECT_TRUE(fs::exists(dir / (std::string("out/clip.") + kind + ".txt"))) << kind;
  }
  EXPECT_TRUE(fs::exists(dir / "out/effective_config.toml"));
}

TEST(CliTest, FeaturesMissingFileNamesPath) {
  TempDir dir;
  const auto r = RunCli(dir, "features " + (dir / "absent.wav") + " -o " + (dir / "out"));
  EXPECT_NE(r.exit_code, 0);
  EXPECT_NE(r.output.find("absent.wav"), std::string::npos) << r.output;
}

TEST(CliTest, FeaturesKappaRaisesRolloff) {
  TempDir dir;
  WriteWav(testing::Noise(16000, 2, 16000), dir / "clip.wav");
  ASSERT_EQ(RunCli(dir, "features " + (dir / "clip.wav") + " -o " + (dir / "lo")).exit_code, 0);
  ASSERT_EQ(RunCli(dir, "features " + (dir / "clip.wav") + " -o " + (dir / "hi") + " --kappa 0.95")
                .exit_code,
            0);
  const FeatureMatrix lo = ReadFeatureMatrix(dir / "lo/clip.rolloff.txt");
  const FeatureMatrix hi = ReadFeatureMatrix(dir / "hi/clip.rolloff.txt");
  ASSERT_EQ(lo.frames(), hi.frames());
  for (std::size_t t = 0; t < lo.frames(); ++t) EXPECT_GE(hi.at(t, 0), lo.at(t, 0));
  EXPECT_EQ(RunCli(dir, "features " + (dir / "clip.wav") + " -o " + (dir / "x") + " --kappa 1.5")
                .exit_code,
            2);
}

TEST(CliTest, EvaluateOraclePredictions) {
  TempDir dir;
  const std::string manifest = MakeCorpus(dir, 4, 3);
  std::vector<Prediction> preds;
  for (const auto& m : ReadManifest(manifest, ClassVocabulary::Default())) {
    preds.push_back({m.clip_id, m.Labels()});
  }
  WritePredictions(preds, dir / "preds.jsonl");
  const auto r = RunCli(dir, "evaluate --manifest " + manifest + " --predictions " +
                              (dir / "preds.jsonl") + " --est-root " + (dir / "corpus") +
                              " -o " + (dir / "report.jsonl"));
  ASSERT_EQ(r.exit_code, 0) << r.output;
  const auto records = ReadJsonl(dir / "report.jsonl");
  ASSERT_EQ(records.size(), 5u);
  const json& summary = records.back();
  EXPECT_EQ(summary["type"], "summary");
  EXPECT_DOUBLE_EQ(summary["acc1"].get<double>(), 1.0);
  EXPECT_DOUBLE_EQ(summary["acc2"].get<double>(), 1.0);
  EXPECT_DOUBLE_EQ(summary["acc3"].get<double>(), 1.0);
  EXPECT_NE(r.output.find("MEAN"), std::string::npos);
}

TEST(CliTest, EvaluateWorkedExampleAndMissingStem) {
  TempDir dir;
  // Truth {Cough, Speech, Dishes}; prediction {Cough, Pour, Typing}.
  MixtureManifest m;
  m.clip_id = "fixture";
  m.duration = 3.0;
  m.sample_rate = 16000;
  m.events = {{"c", "Cough", 0.0, 10.0}, {"s", "Speech", 0.5, 10.0}, {"d", "Dishes", 1.0, 10.0}};
  const SourceResolver sources = [](const std::string& id) {
    return testing::Noise(8000, id[0], 16000);
  };
  WriteCorpus({m}, sources, dir / "corpus");
  WritePredictions({{"fixture", {"Cough", "Pour", "Typing"}}}, dir / "preds.jsonl");
  const auto r = RunCli(dir, "evaluate --manifest " + (dir / "corpus/manifest.jsonl") +
                              " --predictions " + (dir / "preds.jsonl") + " --est-root " +
                              (dir / "corpus") + " -o " + (dir / "report.jsonl"));
  ASSERT_EQ(r.exit_code, 0) << r.output;
  const auto records = ReadJsonl(dir / "report.jsonl");
  EXPECT_DOUBLE_EQ(records[0]["acc3"].get<double>(), 0.2);
  EXPECT_EQ(records[0]["per_class_sdri"]["Pour"].get<double>(), 0.0);
  EXPECT_NE(r.output.find("warning"), std::string::npos);
  EXPECT_NE(r.output.find("Pour"), std::string::npos);
}

TEST(CliTest, EvaluateIdMismatchListsAll) {
  TempDir dir;
  const std::string manifest = MakeCorpus(dir, 3, 5);
  WritePredictions({{"ghost1", {"Cough"}}, {"ghost2", {"Cough"}}}, dir / "preds.jsonl");
  const auto r = RunCli(dir, "evaluate --manifest " + manifest + " --predictions " +
                              (dir / "preds.jsonl"));
  EXPECT_EQ(r.exit_code, 3);
  for (const char* id : {"ghost1", "ghost2", "mix00000", "mix00001", "mix00002"}) {
    EXPECT_NE(r.output.find(id), std::string::npos) << id;
  }
}

TEST(CliTest, AgentOracleImprovesAcc3) {
  TempDir dir;
  const std::string manifest = MakeCorpus(dir, 20, 11);
  const auto r = RunCli(dir, "agent --manifest " + manifest + " -o " + (dir / "agent") +
                              " --oracle-inject-fp 1 --seed 3 --jobs 2 --trace-dir " +
                              (dir / "traces") + " --evaluate");
  ASSERT_EQ(r.exit_code, 0) << r.output;
  const json summary = json::parse(ReadFileToString(dir / "agent/agent_summary.json"));
  EXPECT_TRUE(summary["acc3_not_decreased"].get<bool>());
  EXPECT_GE(summary["post"]["acc3"].get<double>(), summary["pre"]["acc3"].get<double>());
  EXPECT_EQ(summary["failed"], 0);
  EXPECT_TRUE(fs::exists(dir / "traces/mix00000.json"));
  EXPECT_TRUE(fs::exists(dir / "agent/report.jsonl"));
  EXPECT_TRUE(fs::exists(dir / "agent/report_pre.jsonl"));
}

TEST(CliTest, AgentFixedPointWithPerfectTagger) {
  TempDir dir;
  const std::string manifest = MakeCorpus(dir, 6, 13);
  const auto r = RunCli(dir, "agent --manifest " + manifest + " -o " + (dir / "agent") +
                              " --threshold 1.0 --rank-by original_score");
  ASSERT_EQ(r.exit_code, 0) << r.output;
  const auto truth = ReadManifest(manifest, ClassVocabulary::Default());
  const auto preds = ReadPredictions(dir / "agent/predictions.jsonl", ClassVocabulary::Default());
  ASSERT_EQ(preds.size(), truth.size());
  for (std::size_t i = 0; i < preds.size(); ++i) EXPECT_EQ(preds[i].labels, truth[i].Labels());
  for (const auto& m : truth) {
    const json trace = json::parse(ReadFileToString(dir / ("agent/traces/" + m.clip_id + ".json")));
    EXPECT_FALSE(trace["fallback_fired"].get<bool>());
  }
}

TEST(CliTest, AgentWithStubBackend) {
  TempDir dir;
  const std::string manifest = MakeCorpus(dir, 3, 17);
  const std::string stub = S5KIT_STUB_BACKEND;
  const auto r = RunCli(dir, "agent --manifest " + manifest + " -o " + (dir / "agent") +
                              " --backend-tag " + stub + " --backend-sep " + stub);
  ASSERT_EQ(r.exit_code, 0) << r.output;
  EXPECT_EQ(ReadPredictions(dir / "agent/predictions.jsonl", ClassVocabulary::Default()).size(),
            3u);
}

TEST(CliTest, AgentBackendFailuresRecorded) {
  TempDir dir;
  const std::string manifest = MakeCorpus(dir, 3, 19);
  const std::string stub = std::string(S5KIT_STUB_BACKEND) + " --mode error";
  const auto r = RunCli(dir, "agent --manifest " + manifest + " -o " + (dir / "agent") +
                              " --backend-tag '" + stub + "'");
  EXPECT_EQ(r.exit_code, 4) << r.output;
  EXPECT_EQ(ReadJsonl(dir / "agent/failures.jsonl").size(), 3u);
  EXPECT_EQ(RunCli(dir, "agent --manifest " + manifest + " -o " + (dir / "a2") +
                         " --backend-tag /nonexistent/backend")
                .exit_code,
            4);
}

TEST(CliTest, AgentWeightsMustMatchTaggers) {
  TempDir dir;
  const std::string manifest = MakeCorpus(dir, 2, 23);
  const std::string stub = S5KIT_STUB_BACKEND;
  const auto r = RunCli(dir, "agent --manifest " + manifest + " -o " + (dir / "agent") +
                              " --backend-tag " + stub + " --backend-tag " + stub +
                              " --weights 0.35,0.3,0.2");
  EXPECT_EQ(r.exit_code, 2) << r.output;
}

TEST(CliTest, DatasetAuditReproducesRefinementCounts) {
  TempDir dir;
  std::vector<SourceRecord> records = testing::RefinementRecords();
  std::ofstream hetero(dir / "hetero.txt"), added(dir / "added.txt");
  for (auto& r : records) {
    if (r.heterogeneous) hetero << r.id << "\n";
    if (r.added_external) added << r.id << "\n";
    r.heterogeneous = r.added_external = false;
  }
  hetero.close();
  added.close();
  WriteSourceList(records, dir / "sources.jsonl");
  const auto r = RunCli(dir, "dataset audit --sources " + (dir / "sources.jsonl") +
                              " --heterogeneous " + (dir / "hetero.txt") + " --added " +
                              (dir / "added.txt") + " -o " + (dir / "audit.jsonl"));
  ASSERT_EQ(r.exit_code, 0) << r.output;
  const auto rows = ReadJsonl(dir / "audit.jsonl");
  ASSERT_EQ(rows.size(), 18u);
  EXPECT_EQ(rows[13]["class"], "Percussion");
  EXPECT_EQ(rows[13]["final"], 992);
  EXPECT_EQ(rows[8]["final"], 98);
  EXPECT_EQ(rows[12]["final"], 437);
  EXPECT_NE(r.output.find("Percussion"), std::string::npos);
}

TEST(CliTest, DatasetMixIsDeterministic) {
  TempDir dir;
  const std::string a = MakeCorpus(dir, 5, 7, "a");
  const std::string b = MakeCorpus(dir, 5, 7, "b");
  EXPECT_EQ(ReadFileToString(a), ReadFileToString(b));
  EXPECT_EQ(ReadFileToString(dir / "a/mix00004/mixture.wav"),
            ReadFileToString(dir / "b/mix00004/mixture.wav"));
}

TEST(CliTest, DatasetMixRejectsFourEvents) {
  TempDir dir;
  const auto r = RunCli(dir, "dataset mix -o " + (dir / "c") + " --synthetic-pool 1 --events 4");
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.output.find("[1 - 3]"), std::string::npos) << r.output;
}

TEST(CliTest, DatasetMalformedSourceLineNumber) {
  TempDir dir;
  {
    std::ofstream out(dir / "sources.jsonl");
    out << R"({"id":"a","class":"Cough","path":"a.wav","duration":2})" << "\n";
    out << "{broken\n";
  }
  const auto r = RunCli(dir, "dataset audit --sources " + (dir / "sources.jsonl"));
  EXPECT_EQ(r.exit_code, 3);
  EXPECT_NE(r.output.find("line 2"), std::string::npos) << r.output;
}

TEST(CliTest, ConfigFileAndEcho) {
  TempDir dir;
  MakeCorpus(dir, 2, 29, "a");
  const auto r = RunCli(dir, "--config " + (dir / "a/effective_config.toml") + " dataset mix -o " +
                              (dir / "b"));
  ASSERT_EQ(r.exit_code, 0) << r.output;
  EXPECT_EQ(ReadFileToString(dir / "a/manifest.jsonl"), ReadFileToString(dir / "b/manifest.jsonl"));
}

}  // namespace
}  // namespace s5kit
