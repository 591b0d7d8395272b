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

#ifndef MASKMIA_ORACLE_GENERATOR_HPP_
#define MASKMIA_ORACLE_GENERATOR_HPP_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "maskmia/generator.hpp"
#include "maskmia/lm.hpp"
#include "maskmia/textprep.hpp"

namespace maskmia {

struct OracleConfig {
  // A context document is used for alignment only when its word-set
  // Jaccard overlap with the query text is strictly above this.
  double threshold = 0.5;
  // Applied to every cloze answer; models an LLM that silently fixes typos.
  const SpellCorrector* autocorrect = nullptr;
  // Slots separated by whitespace alone are read as one two-word gap.
  bool merge_adjacent = false;
  bool logprobs = false;
};

struct ParsedPrompt {
  std::vector<std::string> context;  // retrieved documents in prompt order
  std::string query;                 // defense sentence removed
};

// Splits a RAG user prompt into context documents and query. Documents are
// assumed free of line breaks; the query is the cloze block when present,
// otherwise the final line. Throws ParseError without a context header.
ParsedPrompt parse_rag_prompt(std::string_view user_prompt);

// Word-set Jaccard overlap of lower-cased, non-punctuation words.
double word_jaccard(std::string_view a, std::string_view b);

// Deterministic stand-in for the black-box LLM of a RAG system. Cloze
// queries are answered by aligning the masked text against the best
// matching context document, falling back to the scorer's top prediction.
class OracleGenerator : public Generator {
 public:
  explicit OracleGenerator(const LmScorer& scorer, OracleConfig config = {},
                           const StopwordList& stopwords = StopwordList::bundled());

  Generation generate(const ChatPrompt& prompt) const override;
  bool supports_logprobs() const override { return config_.logprobs; }
  std::vector<TokenLogprob> text_logprobs(std::string_view text) const override;
  bool concurrent_safe() const override { return scorer_->concurrent_safe(); }

  const OracleConfig& config() const { return config_; }

  std::string answer_cloze(std::span<const std::string> context,
                           std::string_view masked_text) const;
  std::string answer_yes_no(std::span<const std::string> context, std::string_view doc) const;
  std::string answer_open(std::span<const std::string> context, std::string_view query) const;
  std::string select_masks(int mask_count, std::string_view doc) const;

 private:
  const LmScorer* scorer_;
  OracleConfig config_;
  const StopwordList* stopwords_;
};

}  // namespace maskmia

#endif  // MASKMIA_ORACLE_GENERATOR_HPP_
