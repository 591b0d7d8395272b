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

#ifndef MASKMIA_MASKER_HPP_
#define MASKMIA_MASKER_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "maskmia/corpus.hpp"
#include "maskmia/generator.hpp"
#include "maskmia/lm.hpp"
#include "maskmia/textprep.hpp"

namespace maskmia {

inline constexpr int kSkippedRank = -1;

// One scored (or skipped) masking candidate. Whole-word candidates span the
// full surface; token-level candidates (fragment extraction disabled) span
// one token of it.
struct RankEntry {
  std::size_t subtext = 0;
  std::size_t word_index = 0;
  std::size_t begin = 0;  // byte range within the word's surface
  std::size_t end = 0;
  int rank = kSkippedRank;
};
using RankTable = std::vector<RankEntry>;

struct MaskedDocument {
  std::string source_id;
  int mask_count = 0;
  std::string masked_text;  // contains [Mask_1] .. [Mask_M]
  // slot -> {original} or {original, corrected}
  std::map<int, std::vector<std::string>> answers;
  // slot k is word_indices[k-1] of segment(source text)
  std::vector<std::size_t> word_indices;

  friend bool operator==(const MaskedDocument&, const MaskedDocument&) = default;
};

std::string slot_label(int slot);

struct SlotSpan {
  std::size_t begin = 0;  // byte offset of '['
  std::size_t end = 0;    // one past ']'
  int slot = 0;
};
// Every "[Mask_<n>]" occurrence, in text order.
std::vector<SlotSpan> find_slots(std::string_view text);

int rank_word(const LmScorer& scorer, std::string_view word, std::string_view prefix);

// Corrected spelling when present, otherwise the largest rank among the
// fragment's tokens, each scored after the prefix plus the tokens before it.
int rank_fragmented(const LmScorer& scorer, std::string_view prefix,
                    const FragmentedWord& fragment);
// Same, with the prefix taken as the unmasked text before `position`.
int rank_fragmented(const LmScorer& scorer, const WordSequence& words, std::size_t position,
                    const FragmentedWord& fragment);

struct MaskingOptions {
  // Treat multi-token words as one unit. Off = token-level candidates.
  bool fragment_units = true;
  // Record corrected spellings of fragmented words.
  bool spell_correction = true;
};

struct MaskerParts {
  const LmScorer& scorer;
  const TokenizerAdapter& tokenizer;
  const SpellCorrector& corrector;
  const StopwordList& stopwords = StopwordList::bundled();
};

// [begin, end) word ranges of the M subtexts; the remainder goes to the last.
std::vector<std::pair<std::size_t, std::size_t>> subtext_bounds(std::size_t n_words,
                                                                int mask_count);

struct MaskingRun {
  MaskedDocument document;
  RankTable ranks;
};

// Splits the document into M subtexts of equal word count and masks the
// hardest eligible unit of each. Stopwords, punctuation and neighbours of an
// existing mask are never eligible. Throws InsufficientMaskableWords.
MaskingRun run_mask_generation(const Document& doc, int mask_count, const MaskerParts& parts,
                               const MaskingOptions& options = {});

MaskedDocument generate_masks(const Document& doc, int mask_count, const LmScorer& scorer,
                              const TokenizerAdapter& tokenizer, const SpellCorrector& corrector,
                              const MaskingOptions& options = {},
                              const StopwordList& stopwords = StopwordList::bundled());

// Substitutes the given slots; others stay verbatim. Throws InvalidArgument
// for slot numbers outside 1..M.
std::string apply_answers(const MaskedDocument& masked,
                          const std::map<int, std::string>& predictions);
// apply_answers with each slot's first (original-spelling) answer.
std::string restore_original(const MaskedDocument& masked);

nlohmann::json to_json(const MaskedDocument& masked);
MaskedDocument masked_document_from_json(const nlohmann::json& j);

// ---------------------------------------------------------------------------
// Masking strategies, swappable for ablations.

class MaskStrategy {
 public:
  virtual ~MaskStrategy() = default;
  virtual MaskedDocument mask(const Document& doc, int mask_count) const = 0;
  virtual std::string name() const = 0;
  virtual bool concurrent_safe() const { return true; }
};

class ProxyLmMasker : public MaskStrategy {
 public:
  ProxyLmMasker(MaskerParts parts, MaskingOptions options = {}, std::string name = "full")
      : parts_(parts), options_(options), name_(std::move(name)) {}
  MaskedDocument mask(const Document& doc, int mask_count) const override;
  std::string name() const override { return name_; }
  bool concurrent_safe() const override {
    return parts_.scorer.concurrent_safe() && parts_.tokenizer.concurrent_safe() &&
           parts_.corrector.concurrent_safe();
  }

 private:
  MaskerParts parts_;
  MaskingOptions options_;
  std::string name_;
};

// One uniformly random non-punctuation word per subtext. Stopwords and
// adjacent slots are allowed.
class RandomMasker : public MaskStrategy {
 public:
  explicit RandomMasker(std::uint64_t seed, const StopwordList& stopwords = StopwordList::bundled())
      : seed_(seed), stopwords_(&stopwords) {}
  MaskedDocument mask(const Document& doc, int mask_count) const override;
  std::string name() const override { return "random"; }

 private:
  std::uint64_t seed_;
  const StopwordList* stopwords_;
};

std::string llm_mask_prompt(int mask_count, std::string_view text);

// Parses "1. word" list lines followed by the rewritten document. Throws
// MaskRejected when the slot count differs from M or the rewritten text
// does not restore to the source.
MaskedDocument parse_llm_masking(const Document& doc, int mask_count, std::string_view response);

class LlmMasker : public MaskStrategy {
 public:
  explicit LlmMasker(const Generator& generator) : generator_(&generator) {}
  MaskedDocument mask(const Document& doc, int mask_count) const override;
  std::string name() const override { return "llm_based"; }
  bool concurrent_safe() const override { return generator_->concurrent_safe(); }

 private:
  const Generator* generator_;
};

}  // namespace maskmia

#endif  // MASKMIA_MASKER_HPP_
