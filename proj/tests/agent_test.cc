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

#include <gtest/gtest.h>

#include "s5kit/agent.h"
#include "test_util.h"

namespace s5kit {
namespace {

using testing::Noise;

const ClassVocabulary& Vocab() {
  static const ClassVocabulary v({"Cough", "Speech", "Dishes", "Typing", "Doorbell"});
  return v;
}

// Mixture "m" holds Speech + Dishes; the tagger also fires on Cough.
struct Scene {
  std::shared_ptr<const OracleCorpus> corpus;
  const AudioClip& mixture() const { return corpus->clips()[0].mixture; }
};

Scene MakeScene() {
  OracleClip clip{"m", Noise(2000, 1), {{"Speech", Noise(2000, 2)}, {"Dishes", Noise(2000, 3)}}};
  return {std::make_shared<const OracleCorpus>(std::vector<OracleClip>{clip})};
}

std::unique_ptr<Tagger> TaggerWithFalseCough(const Scene& s, OracleTaggerOptions opts = {}) {
  opts.injected["m"]["Cough"] = 0.9;
  return MakeOracleTagger(Vocab(), s.corpus, opts);
}

TEST(CandidateLabelsTest, TopKPlusThreshold) {
  const LabelScores s(Vocab(), {0.9, 0.8, 0.7, 0.6, 0.1});
  AgentConfig cfg;
  cfg.top_k = 2;
  cfg.threshold = 0.65;
  const auto c = CandidateLabels(s, cfg);
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c[0], (ScoredLabel{"Cough", 0.9}));
  EXPECT_EQ(c[2], (ScoredLabel{"Dishes", 0.7}));
  cfg.threshold = 0.7;  // strictly above
  EXPECT_EQ(CandidateLabels(s, cfg).size(), 2u);
}

TEST(CandidateLabelsTest, TiesFollowVocabularyOrder) {
  const LabelScores s(Vocab(), {0.5, 0.5, 0.9, 0.5, 0.5});
  AgentConfig cfg;
  cfg.top_k = 3;
  cfg.threshold = 0.95;
  const auto c = CandidateLabels(s, cfg);
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c[0].label, "Dishes");
  EXPECT_EQ(c[1].label, "Cough");
  EXPECT_EQ(c[2].label, "Speech");
}

TEST(BaselinePredictionTest, ThresholdCapAndTop1) {
  AgentConfig cfg;
  cfg.top_k = 2;
  EXPECT_EQ(BaselinePrediction(LabelScores(Vocab(), {0.9, 0.8, 0.7, 0.1, 0.1}), cfg),
            (LabelSet{"Cough", "Speech"}));
  EXPECT_EQ(BaselinePrediction(LabelScores(Vocab(), {0.2, 0.3, 0.1, 0.1, 0.1}), cfg),
            (LabelSet{"Speech"}));
}

TEST(AgentConfigTest, Validation) {
  AgentConfig cfg;
  cfg.threshold = 1.5;
  EXPECT_S5_ERROR(cfg.Validate(), ErrorCode::kInvalidArgument);
  cfg = {};
  cfg.top_k = 0;
  EXPECT_S5_ERROR(cfg.Validate(), ErrorCode::kInvalidArgument);
  EXPECT_S5_ERROR(ParseRankBy("loudness"), ErrorCode::kInvalidArgument);
  EXPECT_EQ(ParseEmptyFallback(EmptyFallbackName(EmptyFallback::kOriginalTopK)),
            EmptyFallback::kOriginalTopK);
}

TEST(VerifyLabelTest, KeepsOnlyConfirmedLabels) {
  const Scene s = MakeScene();
  auto tagger = TaggerWithFalseCough(s);
  auto sep = MakeOracleSeparator(s.corpus);
  const Verification speech = VerifyLabel(s.mixture(), "Speech", *tagger, *sep);
  EXPECT_TRUE(speech.kept);
  EXPECT_EQ(speech.retag_label, "Speech");
  EXPECT_DOUBLE_EQ(speech.retag_score, 1.0);
  const Verification cough = VerifyLabel(s.mixture(), "Cough", *tagger, *sep);
  EXPECT_FALSE(cough.kept);
  EXPECT_FALSE(cough.retag_label.has_value());
  EXPECT_TRUE(cough.stem.IsSilent());
}

TEST(AgentCorrectTest, RemovesFalsePositiveKeepsTruth) {
  const Scene s = MakeScene();
  auto tagger = TaggerWithFalseCough(s);
  auto sep = MakeOracleSeparator(s.corpus);
  const AgentTrace t = AgentCorrect(s.mixture(), *tagger, *sep);
  EXPECT_EQ(t.FinalSet(), (LabelSet{"Speech", "Dishes"}));
  EXPECT_FALSE(t.fallback_fired);
  EXPECT_EQ(t.final_stems.at("Speech"), s.corpus->clips()[0].stems.at("Speech"));
  // Baseline keeps the false positive.
  EXPECT_TRUE(BaselinePrediction(t.original_scores, {}).contains("Cough"));
  // Every candidate was verified, in candidate order.
  ASSERT_EQ(t.verifications.size(), t.candidates.size());
  for (std::size_t i = 0; i < t.candidates.size(); ++i) {
    EXPECT_EQ(t.verifications[i].label, t.candidates[i].label);
  }
}

TEST(AgentCorrectTest, MixtureFallbackSeparatorAlsoRejectsFalsePositive) {
  const Scene s = MakeScene();
  auto tagger = TaggerWithFalseCough(s);
  auto sep = MakeOracleSeparator(s.corpus, SeparatorFallback::kMixture);
  EXPECT_EQ(AgentCorrect(s.mixture(), *tagger, *sep).FinalSet(),
            (LabelSet{"Speech", "Dishes"}));
}

TEST(AgentCorrectTest, CorruptedRetaggerDropsTruePositive) {
  const Scene s = MakeScene();
  OracleTaggerOptions opts;
  opts.stem_confusions["Dishes"] = "Typing";
  auto tagger = TaggerWithFalseCough(s, opts);
  auto sep = MakeOracleSeparator(s.corpus);
  const AgentTrace t = AgentCorrect(s.mixture(), *tagger, *sep);
  EXPECT_EQ(t.FinalSet(), LabelSet{"Speech"});
}

TEST(AgentCorrectTest, FallbackWhenNothingSurvives) {
  const Scene s = MakeScene();
  OracleTaggerOptions opts;
  opts.stem_confusions["Dishes"] = "Typing";
  opts.stem_confusions["Speech"] = "Typing";
  auto tagger = TaggerWithFalseCough(s, opts);
  auto sep = MakeOracleSeparator(s.corpus);
  AgentConfig cfg;
  const AgentTrace top1 = AgentCorrect(s.mixture(), *tagger, *sep, cfg);
  EXPECT_TRUE(top1.fallback_fired);
  EXPECT_EQ(top1.final_labels, std::vector<std::string>{"Speech"});
  cfg.empty_fallback = EmptyFallback::kOriginalTopK;
  const AgentTrace topk = AgentCorrect(s.mixture(), *tagger, *sep, cfg);
  EXPECT_EQ(topk.final_labels.size(), 3u);
}

TEST(AgentCorrectTest, PerfectTaggerIsFixedPoint) {
  const Scene s = MakeScene();
  auto tagger = MakeOracleTagger(Vocab(), s.corpus);
  auto sep = MakeOracleSeparator(s.corpus);
  AgentConfig cfg;
  cfg.threshold = 1.0;
  cfg.rank_by = RankBy::kOriginalScore;
  const AgentTrace t = AgentCorrect(s.mixture(), *tagger, *sep, cfg);
  EXPECT_EQ(t.FinalSet(), (LabelSet{"Speech", "Dishes"}));
  EXPECT_EQ(t.final_labels, (std::vector<std::string>{"Speech", "Dishes"}));
  EXPECT_FALSE(t.fallback_fired);
}

TEST(AgentCorrectTest, FinalCountBoundedByTopK) {
  OracleClip clip{"m",
                  Noise(2000, 1),
                  {{"Speech", Noise(2000, 2)}, {"Dishes", Noise(2000, 3)},
                   {"Typing", Noise(2000, 4)}, {"Doorbell", Noise(2000, 5)}}};
  auto corpus = std::make_shared<const OracleCorpus>(std::vector<OracleClip>{clip});
  auto tagger = MakeOracleTagger(Vocab(), corpus);
  auto sep = MakeOracleSeparator(corpus);
  for (std::size_t k : {1u, 2u, 3u}) {
    AgentConfig cfg;
    cfg.top_k = k;
    const AgentTrace t = AgentCorrect(clip.mixture, *tagger, *sep, cfg);
    EXPECT_EQ(t.final_labels.size(), k);
    EXPECT_EQ(t.candidates.size(), 4u);  // all four clear the threshold
  }
}

TEST(AgentCorrectTest, ReuseVerificationStems) {
  const Scene s = MakeScene();
  auto tagger = TaggerWithFalseCough(s);
  auto sep = MakeOracleSeparator(s.corpus);
  AgentConfig cfg;
  cfg.reuse_verification_stems = true;
  const AgentTrace a = AgentCorrect(s.mixture(), *tagger, *sep, cfg);
  const AgentTrace b = AgentCorrect(s.mixture(), *tagger, *sep);
  EXPECT_EQ(a.final_stems, b.final_stems);
}

TEST(AgentCorrectTest, BackendFailureNamesLabel) {
  const Scene s = MakeScene();
  auto tagger = TaggerWithFalseCough(s);
  auto other = std::make_shared<const OracleCorpus>(
      std::vector<OracleClip>{{"x", Noise(2000, 9), {{"Speech", Noise(2000, 10)}}}});
  auto sep = MakeOracleSeparator(other);
  try {
    AgentCorrect(s.mixture(), *tagger, *sep);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBackend);
    // Speech is the first candidate and the first separation to fail.
    EXPECT_NE(std::string(e.what()).find("'Speech'"), std::string::npos) << e.what();
  }
}

TEST(TraceToJsonTest, CarriesDecisions) {
  const Scene s = MakeScene();
  auto tagger = TaggerWithFalseCough(s);
  auto sep = MakeOracleSeparator(s.corpus);
  const auto j = TraceToJson("m", AgentCorrect(s.mixture(), *tagger, *sep));
  EXPECT_EQ(j["clip_id"], "m");
  EXPECT_EQ(j["final_labels"].size(), 2u);
  bool saw_cough = false;
  for (const auto& v : j["verifications"]) {
    if (v["label"] == "Cough") {
      saw_cough = true;
      EXPECT_FALSE(v["kept"].get<bool>());
      EXPECT_TRUE(v["retag_label"].is_null());
    }
  }
  EXPECT_TRUE(saw_cough);
}

}  // namespace
}  // namespace s5kit
