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

#include "maskmia/masker.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "fixtures.hpp"
#include "mask_oracle.hpp"
#include "maskmia/error.hpp"
#include "maskmia/synth.hpp"

namespace maskmia {
namespace {

using testing::ChunkTokenizer;
using testing::TableScorer;
using testing::ToyScorer;

const std::vector<std::string> kContent = {
    "patient", "doctor", "fever",   "cough",   "tablet",   "morning",  "clinic",  "advice",
    "dosage",  "severe", "chronic", "allergy", "nausea",   "therapy",  "symptom", "canestan",
    "nearly",  "walked", "swollen", "rash",    "ointment", "pharmacy", "x-ray",   "results"};
const std::vector<std::string> kFunction = {"the", "a",    "of",  "and", "to", "is",
                                            "was", "with", "for", "my",  "it", "in"};

std::string random_text(Rng& rng, std::size_t words) {
  std::string text;
  for (std::size_t i = 0; i < words; ++i) {
    if (i) text += ' ';
    text += bernoulli(rng, 0.6) ? pick(kContent, rng) : pick(kFunction, rng);
    if (bernoulli(rng, 0.08)) text += bernoulli(rng, 0.5) ? "," : ".";
  }
  return text;
}

TEST(RankWord, DentistIsThird) {
  TableScorer scorer;
  scorer.set("a", {{"doctor", 0.6}, {"medical", 0.25}, {"dentist", 0.15}});
  EXPECT_EQ(rank_word(scorer, "dentist", "I would advise you to visit a"), 3);
  EXPECT_EQ(rank_word(scorer, "doctor", "I would advise you to visit a"), 1);
  EXPECT_THROW(rank_word(scorer, "", "x a"), InvalidArgument);
}

TEST(RankWord, ToyVocabularyMatchesFullSort) {
  const std::vector<std::string> vocab = {"apple", "bread",  "cheese", "dates", "eggs",
                                          "flour", "grapes", "honey",  "icing", "jam"};
  const ToyScorer scorer(vocab, 21);
  for (const std::string prefix : {"", "I bought", "some fresh", "with honey"}) {
    const std::string ctx = testing::last_run(prefix);
    std::vector<std::pair<double, std::string>> scored;
    for (const auto& v : vocab) scored.emplace_back(-scorer.weight(v, ctx), v);
    std::sort(scored.begin(), scored.end());
    for (std::size_t i = 0; i < scored.size(); ++i) {
      EXPECT_EQ(rank_word(scorer, scored[i].second, prefix), static_cast<int>(i) + 1);
    }
    EXPECT_EQ(rank_word(scorer, scorer.top1(prefix), prefix), 1);
    EXPECT_EQ(rank_word(scorer, "kiwi", prefix), 11);
  }
}

// Brute force over the bigram model's own probabilities.
TEST(RankWord, BigramRankMatchesEnumeration) {
  SynthSpec spec;
  spec.documents = 60;
  spec.seed = 31;
  const Corpus corpus = synth_corpus(spec);
  const BigramScorer scorer = BigramScorer::from_corpus(corpus);
  std::set<std::string> vocab;
  for (const auto& d : corpus) {
    const WordSequence seq = segment(d.text);
    for (const Word& w : seq.words()) {
      if (!w.is_punctuation) vocab.insert(to_lower(w.surface));
    }
  }
  ASSERT_EQ(vocab.size(), scorer.vocabulary_size());
  Rng rng(3);
  const std::vector<std::string> words(vocab.begin(), vocab.end());
  for (int trial = 0; trial < 60; ++trial) {
    const std::string prefix = trial % 7 == 0 ? "" : "we saw the " + pick(words, rng);
    const std::string ctx = scorer.context_of(prefix);
    std::vector<std::pair<double, std::string>> scored;
    for (const auto& w : words) scored.emplace_back(-scorer.probability(w, ctx), w);
    std::sort(scored.begin(), scored.end());
    for (int probe = 0; probe < 15; ++probe) {
      const std::size_t i = uniform_index(rng, scored.size());
      ASSERT_EQ(scorer.rank_of(scored[i].second, prefix), static_cast<int>(i) + 1)
          << scored[i].second << " after '" << prefix << "'";
    }
    ASSERT_EQ(scorer.top1(prefix), scored.front().second);
    ASSERT_EQ(scorer.rank_of("zzqx", prefix), static_cast<int>(words.size()) + 1);
  }
}

TEST(RankFragmented, TakesLargestTokenRank) {
  TableScorer scorer;
  std::vector<std::pair<std::string, double>> after_take, after_can, after_canest;
  after_take = {{"a", 0.5}, {"can", 0.3}, {"the", 0.1}};
  for (int i = 0; i < 6; ++i) after_can.emplace_back("w" + std::to_string(i), 0.9 - 0.1 * i);
  after_can.emplace_back("est", 0.05);
  after_canest = {{"er", 0.4}, {"ed", 0.3}, {"s", 0.2}, {"an", 0.1}};
  scorer.set("take", after_take);
  scorer.set("can", after_can);
  scorer.set("canest", after_canest);
  const FragmentedWord frag{"canestan", 1, {"can", "est", "an"}, std::nullopt};
  const int r1 = scorer.rank_of("can", "take ");
  const int r2 = scorer.rank_of("est", "take can");
  const int r3 = scorer.rank_of("an", "take canest");
  ASSERT_EQ((std::vector<int>{r1, r2, r3}), (std::vector<int>{2, 7, 4}));
  EXPECT_EQ(rank_fragmented(scorer, "take ", frag), std::max({r1, r2, r3}));
  const WordSequence seq = segment("take canestan daily");
  EXPECT_EQ(rank_fragmented(scorer, seq, 1, frag), 7);
  EXPECT_THROW(rank_fragmented(scorer, seq, 0, frag), InvalidArgument);
}

TEST(RankFragmented, CorrectedSpellingIsRankedWhole) {
  TableScorer scorer;
  scorer.set("walked", {{"home", 0.5}, {"away", 0.3}, {"nearly", 0.2}});
  const FragmentedWord frag{"nearlt", 2, {"near", "lt"}, std::string("nearly")};
  EXPECT_EQ(rank_fragmented(scorer, "I walked ", frag), rank_word(scorer, "nearly", "I walked "));
}

TEST(RankFragmented, SingleTokenIsRejected) {
  TableScorer scorer;
  const FragmentedWord frag{"cat", 0, {"cat"}, std::nullopt};
  EXPECT_THROW(rank_fragmented(scorer, "", frag), InvalidArgument);
}

TEST(SubtextBounds, RemainderGoesLast) {
  const auto b = subtext_bounds(23, 5);
  ASSERT_EQ(b.size(), 5u);
  EXPECT_EQ(b[0], (std::pair<std::size_t, std::size_t>{0, 4}));
  EXPECT_EQ(b[4], (std::pair<std::size_t, std::size_t>{16, 23}));
  EXPECT_THROW(subtext_bounds(10, 0), InvalidArgument);
}

class GenerateMasks : public ::testing::Test {
 protected:
  ToyScorer scorer_{kContent, 5};
  ChunkTokenizer tokenizer_{5};
  IdentityCorrector identity_;
  MaskerParts parts_{scorer_, tokenizer_, identity_};
};

TEST_F(GenerateMasks, SingleMask) {
  const Document doc{"d", "the patient walked to the clinic with a severe rash"};
  const MaskedDocument md = ProxyLmMasker(parts_).mask(doc, 1);
  EXPECT_EQ(find_slots(md.masked_text).size(), 1u);
  EXPECT_EQ(md.answers.size(), 1u);
  EXPECT_EQ(restore_original(md), doc.text);
}

// A twenty-word document split in two halves, against the exhaustive sweep.
TEST_F(GenerateMasks, TwentyWordHalvesMatchSweep) {
  Rng rng(12);
  for (int trial = 0; trial < 40; ++trial) {
    const Document doc{"d", random_text(rng, 20)};
    const auto expected = testing::exhaustive_mask_positions(doc.text, 2, scorer_, tokenizer_);
    if (!expected) {
      EXPECT_THROW(ProxyLmMasker(parts_).mask(doc, 2), InsufficientMaskableWords);
      continue;
    }
    EXPECT_EQ(ProxyLmMasker(parts_).mask(doc, 2).word_indices, *expected) << doc.text;
  }
}

TEST_F(GenerateMasks, RankTableSkipsExactlyIneligible) {
  const Document doc{"d", "the patient, the doctor and a severe fever with nausea."};
  const MaskingRun run = run_mask_generation(doc, 2, parts_);
  const WordSequence seq = segment(doc.text);
  std::set<std::size_t> masked(run.document.word_indices.begin(), run.document.word_indices.end());
  for (const RankEntry& e : run.ranks) {
    const Word& w = seq[e.word_index];
    bool adjacent = false;
    for (std::size_t m : masked) {
      // Only masks placed in earlier subtexts can disqualify a position.
      const bool earlier =
          std::find(run.document.word_indices.begin(), run.document.word_indices.end(), m) -
              run.document.word_indices.begin() <
          static_cast<long>(e.subtext);
      if (earlier && (m + 1 == e.word_index || e.word_index + 1 == m)) adjacent = true;
    }
    const bool ineligible = w.is_punctuation || w.is_stopword || adjacent;
    EXPECT_EQ(e.rank == kSkippedRank, ineligible) << w.surface;
  }
}

TEST_F(GenerateMasks, InsufficientWordsNamesSubtext) {
  const Document doc{"d", "severe fever and the of a to"};
  try {
    ProxyLmMasker(parts_).mask(doc, 2);
    FAIL() << "expected InsufficientMaskableWords";
  } catch (const InsufficientMaskableWords& e) {
    EXPECT_EQ(e.subtext(), 2);
  }
}

TEST_F(GenerateMasks, CorrectedWordsCarryBothSpellings) {
  const auto& corrector = DictionaryCorrector::bundled();
  const ToyScorer scorer({"walked"}, 2);
  const MaskerParts parts{scorer, tokenizer_, corrector};
  const Document doc{"d", "I walked nearlt home"};
  const MaskedDocument md = generate_masks(doc, 1, scorer, tokenizer_, corrector);
  ASSERT_EQ(md.answers.size(), 1u);
  const auto& answers = md.answers.at(1);
  const std::string masked_word = segment(doc.text)[md.word_indices[0]].surface;
  if (masked_word == "nearlt") {
    EXPECT_EQ(answers, (std::vector<std::string>{"nearlt", "nearly"}));
  } else {
    EXPECT_EQ(answers.size(), 1u);
  }
  // Every fragment the corrector fixes yields a two-spelling answer set.
  Rng rng(2);
  const ProxyLmMasker masker(parts);
  for (int trial = 0; trial < 30; ++trial) {
    const Document d{"x", random_text(rng, 40) + " nearlt"};
    const MaskedDocument out = masker.mask(d, 4);
    const WordSequence seq = segment(d.text);
    auto fixed = correct_words(seq, extract_fragmented_words(seq, tokenizer_), corrector);
    for (int slot = 1; slot <= 4; ++slot) {
      const std::size_t wi = out.word_indices[static_cast<std::size_t>(slot - 1)];
      const auto it = std::find_if(fixed.begin(), fixed.end(),
                                   [&](const FragmentedWord& f) { return f.word_index == wi; });
      const bool corrected = it != fixed.end() && it->corrected.has_value();
      EXPECT_EQ(out.answers.at(slot).size(), corrected ? 2u : 1u);
    }
  }
}

TEST_F(GenerateMasks, Deterministic) {
  Rng rng(17);
  const ProxyLmMasker masker(parts_);
  for (int trial = 0; trial < 10; ++trial) {
    const Document doc{"d" + std::to_string(trial), random_text(rng, 80)};
    EXPECT_EQ(masker.mask(doc, 5), masker.mask(doc, 5));
  }
}

TEST_F(GenerateMasks, TokenLevelCandidatesWhenFragmentsOff) {
  const Document doc{"d", "the pharmacy ointment helped"};
  const MaskingRun run = run_mask_generation(doc, 1, parts_, {false, false});
  std::size_t token_entries = 0;
  for (const auto& e : run.ranks) token_entries += e.rank != kSkippedRank;
  // pharmacy -> 2 tokens, ointment -> 2, helped -> 2 with five-byte chunks
  EXPECT_EQ(token_entries, 6u);
  EXPECT_EQ(restore_original(run.document), doc.text);
}

TEST(ApplyAnswers, SubstitutesCoveredSlotsOnly) {
  MaskedDocument md;
  md.source_id = "d";
  md.mask_count = 2;
  md.masked_text = "visit a [Mask_1] for the [Mask_2].";
  md.answers = {{1, {"dentist"}}, {2, {"rash"}}};
  md.word_indices = {2, 5};
  EXPECT_EQ(restore_original(md), "visit a dentist for the rash.");
  EXPECT_EQ(apply_answers(md, {}), md.masked_text);
  EXPECT_EQ(apply_answers(md, {{2, "pain"}}), "visit a [Mask_1] for the pain.");
  EXPECT_THROW(apply_answers(md, {{3, "x"}}), InvalidArgument);
  EXPECT_THROW(apply_answers(md, {{0, "x"}}), InvalidArgument);
}

TEST(MaskedDocumentJson, RoundTripsWithStringSlotKeys) {
  MaskedDocument md{
      "d", 2, "[Mask_1] and [Mask_2]", {{1, {"nearlt", "nearly"}}, {2, {"home"}}}, {0, 2}};
  const auto j = to_json(md);
  EXPECT_EQ(j.at("answers").at("1"), (nlohmann::json{"nearlt", "nearly"}));
  EXPECT_EQ(masked_document_from_json(j), md);
}

TEST(RandomMasker, OnePerSubtextAnyNonPunctuation) {
  Rng rng(23);
  const RandomMasker masker(99);
  for (int trial = 0; trial < 50; ++trial) {
    const Document doc{"r" + std::to_string(trial), random_text(rng, 60)};
    const MaskedDocument md = masker.mask(doc, 6);
    const WordSequence seq = segment(doc.text);
    const auto bounds = subtext_bounds(seq.size(), 6);
    ASSERT_EQ(md.word_indices.size(), 6u);
    for (std::size_t s = 0; s < 6; ++s) {
      EXPECT_GE(md.word_indices[s], bounds[s].first);
      EXPECT_LT(md.word_indices[s], bounds[s].second);
      EXPECT_FALSE(seq[md.word_indices[s]].is_punctuation);
    }
    EXPECT_EQ(restore_original(md), doc.text);
    EXPECT_EQ(masker.mask(doc, 6), md);
  }
}

TEST(LlmMasking, AcceptsWellFormedReply) {
  const Document doc{"d", "take canestan daily for the rash"};
  const MaskedDocument md =
      parse_llm_masking(doc, 2, "1. canestan\n2. rash\n\ntake [Mask_1] daily for the [Mask_2]");
  EXPECT_EQ(md.answers.at(1), (std::vector<std::string>{"canestan"}));
  EXPECT_EQ(restore_original(md), doc.text);
}

TEST(LlmMasking, RejectsWrongCountOrDivergentText) {
  const Document doc{"d", "take canestan daily for the rash"};
  EXPECT_THROW(parse_llm_masking(doc, 2, "1. canestan\n\ntake [Mask_1] daily for the rash"),
               MaskRejected);
  EXPECT_THROW(
      parse_llm_masking(doc, 2, "1. canestan\n2. rash\n\ntake [Mask_1] weekly for the [Mask_2]"),
      MaskRejected);
  EXPECT_THROW(parse_llm_masking(doc, 2, "I cannot help with that."), MaskRejected);
}

TEST(LlmMasking, PromptWording) {
  EXPECT_EQ(llm_mask_prompt(3, "abc"),
            "Select 3 words or phrases from the following document that would be difficult to "
            "guess without seeing the document. Return them as a numbered list, then rewrite the "
            "document replacing each with [Mask_i]. Document: abc");
}

}  // namespace
}  // namespace maskmia
