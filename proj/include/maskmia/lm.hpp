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

#ifndef MASKMIA_LM_HPP_
#define MASKMIA_LM_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "maskmia/corpus.hpp"
#include "maskmia/textprep.hpp"

namespace maskmia {

struct TokenLogprob {
  std::string token;
  double logprob = 0.0;  // natural log, <= 0
};

// Proxy language model used to judge how hard a word is to predict.
class LmScorer {
 public:
  virtual ~LmScorer() = default;
  // 1-based position of `word` among the candidate continuations of
  // `prefix`, most likely first. 1 iff word == top1(prefix).
  virtual int rank_of(std::string_view word, std::string_view prefix) const = 0;
  virtual std::string top1(std::string_view prefix) const = 0;
  virtual std::vector<TokenLogprob> token_logprobs(std::string_view text) const = 0;
  virtual bool concurrent_safe() const { return true; }
};

// Interpolated word-bigram model:
//   P(w | c) = lambda * n(c, w) / n(c) + (1 - lambda) * (n(w) + 1) / (N + V + 1)
// with lambda dropped to 0 for unseen contexts. Words are lower-cased
// non-punctuation tokens; "<s>" opens each document and follows '.', '!'
// and '?'. Ranks order the vocabulary by probability, ties lexicographic;
// out-of-vocabulary words rank V + 1.
class BigramScorer : public LmScorer {
 public:
  static constexpr std::string_view kStart = "<s>";

  explicit BigramScorer(std::span<const std::string> texts, double lambda = 0.7,
                        const StopwordList& stopwords = StopwordList::bundled());
  static BigramScorer from_corpus(const Corpus& corpus, double lambda = 0.7);

  int rank_of(std::string_view word, std::string_view prefix) const override;
  std::string top1(std::string_view prefix) const override;
  std::vector<TokenLogprob> token_logprobs(std::string_view text) const override;

  std::size_t vocabulary_size() const { return vocab_.size(); }
  double lambda() const { return lambda_; }
  // Probability of `word` after context word `context` (lower-case).
  double probability(std::string_view word, std::string_view context) const;
  // Context word the model conditions on for a given prefix.
  std::string context_of(std::string_view prefix) const;

 private:
  struct ContextStats {
    std::uint64_t total = 0;
    std::unordered_map<std::uint32_t, std::uint64_t> next;
  };
  double unigram_part(std::uint64_t count) const;
  double prob_id(std::uint64_t unigram_count, std::uint64_t pair_count,
                 const ContextStats* ctx) const;
  const ContextStats* find_context(std::string_view context) const;

  double lambda_;
  const StopwordList* stopwords_;
  std::vector<std::string> vocab_;
  std::unordered_map<std::string, std::uint32_t> ids_;
  std::vector<std::uint64_t> unigram_;
  std::uint64_t total_ = 0;
  std::unordered_map<std::string, ContextStats> contexts_;
  std::vector<std::uint32_t> order_;     // ids by (count desc, word asc)
  std::vector<std::uint32_t> position_;  // inverse of order_
};

}  // namespace maskmia

#endif  // MASKMIA_LM_HPP_
