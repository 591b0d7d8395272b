// Copyright 2026 The maskmia Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "maskmia/error.hpp"
#include "maskmia/experiment.hpp"
#include "maskmia/metrics.hpp"
#include "maskmia/oracle_generator.hpp"
#include "maskmia/random.hpp"
#include "maskmia/synth.hpp"

namespace maskmia {
namespace {

double pair_auc(const std::vector<ScoredLabel>& s) {
  long twice = 0, pairs = 0;
  for (const auto& p : s) {
    if (!p.member) continue;
    for (const auto& n : s) {
      if (n.member) continue;
      ++pairs;
      twice += p.score > n.score ? 2 : p.score == n.score ? 1 : 0;
    }
  }
  return static_cast<double>(twice) / (2.0 * static_cast<double>(pairs));
}

TEST(RocAuc, HandExamples) {
  EXPECT_EQ(roc_auc(std::vector<ScoredLabel>{{0.9, true}, {0.1, false}}), 1.0);
  EXPECT_EQ(roc_auc(std::vector<ScoredLabel>{{0.9, true}, {0.4, true}, {0.5, false}, {0.1, false}}),
            0.75);
  EXPECT_EQ(roc_auc(std::vector<ScoredLabel>{{0.3, true}, {0.3, false}}), 0.5);
  EXPECT_THROW(roc_auc(std::vector<ScoredLabel>{{0.3, true}}), InvalidArgument);
}

TEST(RocAuc, MatchesPairEnumerationAndIgnoresMonotoneMaps) {
  Rng rng(4);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + uniform_index(rng, 60);
    std::vector<ScoredLabel> s(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = {static_cast<double>(uniform_index(rng, 8)) / 8.0, bernoulli(rng, 0.5)};
    }
    s[0].member = true;
    s[1].member = false;
    const double auc = roc_auc(s);
    ASSERT_EQ(auc, pair_auc(s));
    std::vector<ScoredLabel> mapped = s;
    for (auto& v : mapped) v.score = std::exp(3.0 * v.score) - 7.0;
    ASSERT_EQ(roc_auc(mapped), auc);
    for (auto& v : mapped) v.score = -v.score;
    ASSERT_DOUBLE_EQ(roc_auc(mapped), 1.0 - auc);  // 1 - a/b rounds differently
  }
}

TEST(Confusion, AllCorrect) {
  const std::vector<Prediction> p = {{true, true}, {false, false}, {true, true}};
  const ConfusionMetrics m = confusion_metrics(p);
  EXPECT_EQ(m.tp, 2u);
  EXPECT_EQ(m.tn, 1u);
  EXPECT_EQ(m.accuracy, 1.0);
  EXPECT_EQ(m.f1, 1.0);
}

TEST(Confusion, AllPredictedMember) {
  const std::vector<Prediction> p = {{true, true}, {true, false}};
  const ConfusionMetrics m = confusion_metrics(p);
  EXPECT_EQ(m.precision, 0.5);
  EXPECT_EQ(m.recall, 1.0);
  EXPECT_DOUBLE_EQ(m.f1, 2.0 / 3.0);
  EXPECT_FALSE(m.precision_undefined);
  const ConfusionMetrics none = confusion_metrics(std::vector<Prediction>{{false, false}});
  EXPECT_TRUE(none.precision_undefined);
  EXPECT_TRUE(none.recall_undefined);
  EXPECT_EQ(none.f1, 0.0);
}

TEST(RetrievalRecall, MembersOnly) {
  const std::vector<RetrievalFlag> f = {{true, true}, {true, true},   {false, true},
                                        {true, true}, {false, false}, {true, false}};
  EXPECT_EQ(retrieval_recall(f), 0.75);
  EXPECT_THROW(retrieval_recall(std::vector<RetrievalFlag>{{true, false}}), InvalidArgument);
}

LabeledOutcome outcome(int correct, int m, bool member, bool retrieved = true) {
  LabeledOutcome o;
  o.outcome.source_id = "x";
  o.outcome.mask_count = m;
  o.outcome.correct_count = correct;
  o.outcome.accuracy = static_cast<double>(correct) / m;
  o.outcome.verdict = Verdict::kNonMember;
  o.outcome.retrieved_target = retrieved;
  o.member = member;
  return o;
}

TEST(Evaluate, ExcludesInconclusiveAndRethresholds) {
  std::vector<LabeledOutcome> outs = {outcome(9, 10, true), outcome(6, 10, true, false),
                                      outcome(3, 10, false), outcome(7, 10, false)};
  LabeledOutcome skipped = outcome(0, 10, true);
  skipped.outcome.verdict = Verdict::kInconclusive;
  skipped.outcome.note = "mask rejected: too few words";
  outs.push_back(skipped);
  const MetricsReport lo = evaluate(outs, 0.5);
  const MetricsReport hi = evaluate(outs, 0.8);
  EXPECT_EQ(lo.n_inconclusive, 1u);
  EXPECT_EQ(lo.n_rejected, 1u);
  EXPECT_EQ(lo.n_member, 2u);
  EXPECT_EQ(lo.roc_auc, 0.75);
  EXPECT_EQ(lo.retrieval_recall, 0.5);
  EXPECT_DOUBLE_EQ(lo.mean_member_accuracy, 0.75);
  // gamma moves only the thresholded metrics
  EXPECT_EQ(lo.roc_auc, hi.roc_auc);
  EXPECT_EQ(lo.retrieval_recall, hi.retrieval_recall);
  EXPECT_EQ(lo.confusion.tp, 2u);
  EXPECT_EQ(lo.confusion.fp, 1u);
  EXPECT_EQ(hi.confusion.tp, 1u);
  EXPECT_EQ(hi.confusion.fp, 0u);
}

TEST(Ranges, InclusiveAndRounded) {
  const auto g = parse_range("0.1:1.0:0.1");
  ASSERT_EQ(g.size(), 10u);
  EXPECT_EQ(g.front(), 0.1);
  EXPECT_EQ(g[2], 0.3);
  EXPECT_EQ(g.back(), 1.0);
  EXPECT_EQ(parse_range("5:20:5"), (std::vector<double>{5, 10, 15, 20}));
  EXPECT_THROW(parse_range("1:2"), InvalidArgument);
  EXPECT_THROW(parse_range("1:2:0"), InvalidArgument);
}

TEST(Ablation, StrategyNamesRoundTrip) {
  for (auto s : {AblationStrategy::kRandom, AblationStrategy::kLlmBased, AblationStrategy::kPlmOnly,
                 AblationStrategy::kNoSpellCorrection, AblationStrategy::kFull}) {
    EXPECT_EQ(parse_ablation_strategy(to_string(s)), s);
  }
  EXPECT_THROW(parse_ablation_strategy("fancy"), InvalidArgument);
}

class SweepFixture : public ::testing::Test {
 protected:
  SweepFixture() {
    SynthSpec spec;
    spec.documents = 24;
    spec.seed = 13;
    const Corpus all = synth_corpus(spec);
    std::vector<Document> kb;
    for (std::size_t i = 0; i < all.size(); ++i) {
      if (i < 12) kb.push_back(all[i]);
      if (i % 3 == 0) docs_.push_back({all[i], i < 12});
    }
    knowledge_ = Corpus(std::move(kb));
    SynthSpec bg;
    bg.documents = 150;
    bg.seed = 91;
    bg.id_prefix = "bg";
    std::vector<std::string> texts;
    for (const auto& d : synth_corpus(bg)) texts.push_back(d.text);
    scorer_ = std::make_unique<BigramScorer>(texts);
    oracle_ = std::make_unique<OracleGenerator>(*scorer_);
  }

  std::string csv(std::size_t workers) {
    const RagSystem rag(knowledge_, embedder_, *oracle_);
    const ProxyLmMasker masker({*scorer_, GreedySubwordTokenizer::bundled(), identity_});
    SweepSpec spec;
    spec.mask_counts = {2, 4};
    spec.gammas = {0.3, 0.7};
    spec.top_ks = {2, 4};
    const SweepResult r = sweep(spec, docs_, rag, masker, 2, workers);
    const auto path = std::filesystem::temp_directory_path() /
                      ("maskmia_sweep_" + std::to_string(workers) + ".csv");
    write_sweep_csv(r, path);
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    std::filesystem::remove(path);
    return ss.str();
  }

  Corpus knowledge_;
  std::vector<LabeledDocument> docs_;
  std::unique_ptr<BigramScorer> scorer_;
  std::unique_ptr<OracleGenerator> oracle_;
  HashedBowEmbedder embedder_;
  IdentityCorrector identity_;
};

TEST_F(SweepFixture, OneRowPerGridPointAndWorkerIndependent) {
  const std::string serial = csv(1);
  EXPECT_EQ(std::count(serial.begin(), serial.end(), '\n'), 1 + 2 * 2 * 2);
  EXPECT_EQ(serial, csv(4));
  EXPECT_EQ(serial, csv(1));
}

}  // namespace
}  // namespace maskmia
