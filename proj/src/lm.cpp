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

#include "maskmia/lm.hpp"

#include <algorithm>
#include <cmath>

#include "maskmia/error.hpp"

namespace maskmia {
namespace {

bool ends_sentence(std::string_view punct) {
  return punct.find_first_of(".!?") != std::string_view::npos;
}

}  // namespace

BigramScorer::BigramScorer(std::span<const std::string> texts, double lambda,
                           const StopwordList& stopwords)
    : lambda_(lambda), stopwords_(&stopwords) {
  if (!(lambda >= 0.0 && lambda < 1.0)) {
    throw InvalidArgument("bigram lambda must lie in [0, 1)");
  }
  std::unordered_map<std::string, std::unordered_map<std::string, std::uint64_t>> pairs;
  std::unordered_map<std::string, std::uint64_t> counts;
  for (const std::string& text : texts) {
    if (is_blank(text)) continue;
    std::string prev(kStart);
    const WordSequence seq = segment(text, stopwords);
    for (const Word& w : seq.words()) {
      if (w.is_punctuation) {
        if (ends_sentence(w.surface)) prev = kStart;
        continue;
      }
      std::string lw = to_lower(w.surface);
      ++counts[lw];
      ++pairs[prev][lw];
      prev = std::move(lw);
    }
  }
  vocab_.reserve(counts.size());
  for (const auto& [w, c] : counts) vocab_.push_back(w);
  std::sort(vocab_.begin(), vocab_.end());
  unigram_.resize(vocab_.size());
  for (std::uint32_t i = 0; i < vocab_.size(); ++i) {
    ids_.emplace(vocab_[i], i);
    unigram_[i] = counts[vocab_[i]];
    total_ += unigram_[i];
  }
  order_.resize(vocab_.size());
  for (std::uint32_t i = 0; i < vocab_.size(); ++i) order_[i] = i;
  std::stable_sort(order_.begin(), order_.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return unigram_[a] > unigram_[b]; });
  position_.resize(vocab_.size());
  for (std::uint32_t k = 0; k < order_.size(); ++k) position_[order_[k]] = k;

  for (auto& [ctx, nexts] : pairs) {
    ContextStats stats;
    for (const auto& [w, c] : nexts) {
      stats.next.emplace(ids_.at(w), c);
      stats.total += c;
    }
    contexts_.emplace(ctx, std::move(stats));
  }
}

BigramScorer BigramScorer::from_corpus(const Corpus& corpus, double lambda) {
  std::vector<std::string> texts;
  texts.reserve(corpus.size());
  for (const Document& d : corpus) texts.push_back(d.text);
  return BigramScorer(texts, lambda);
}

const BigramScorer::ContextStats* BigramScorer::find_context(std::string_view context) const {
  auto it = contexts_.find(std::string(context));
  return it == contexts_.end() || it->second.total == 0 ? nullptr : &it->second;
}

double BigramScorer::unigram_part(std::uint64_t count) const {
  return (static_cast<double>(count) + 1.0) /
         (static_cast<double>(total_) + static_cast<double>(vocab_.size()) + 1.0);
}

double BigramScorer::prob_id(std::uint64_t unigram_count, std::uint64_t pair_count,
                             const ContextStats* ctx) const {
  const double lam = ctx ? lambda_ : 0.0;
  const double bigram =
      ctx ? static_cast<double>(pair_count) / static_cast<double>(ctx->total) : 0.0;
  return lam * bigram + (1.0 - lam) * unigram_part(unigram_count);
}

std::string BigramScorer::context_of(std::string_view prefix) const {
  if (is_blank(prefix)) return std::string(kStart);
  const WordSequence seq = segment(prefix, *stopwords_);
  for (std::size_t i = seq.size(); i-- > 0;) {
    const Word& w = seq[i];
    if (!w.is_punctuation) return to_lower(w.surface);
    if (ends_sentence(w.surface)) return std::string(kStart);
  }
  return std::string(kStart);
}

double BigramScorer::probability(std::string_view word, std::string_view context) const {
  const ContextStats* ctx = find_context(context);
  auto it = ids_.find(to_lower(word));
  if (it == ids_.end()) return prob_id(0, 0, ctx);
  std::uint64_t pair = 0;
  if (ctx) {
    if (auto n = ctx->next.find(it->second); n != ctx->next.end()) pair = n->second;
  }
  return prob_id(unigram_[it->second], pair, ctx);
}

int BigramScorer::rank_of(std::string_view word, std::string_view prefix) const {
  const auto it = ids_.find(to_lower(word));
  if (it == ids_.end()) return static_cast<int>(vocab_.size()) + 1;
  const std::uint32_t id = it->second;
  const ContextStats* ctx = find_context(context_of(prefix));
  auto pair_of = [&](std::uint32_t v) -> std::uint64_t {
    if (!ctx) return 0;
    auto n = ctx->next.find(v);
    return n == ctx->next.end() ? 0 : n->second;
  };
  const double p = prob_id(unigram_[id], pair_of(id), ctx);
  auto beats = [&](double pv, std::uint32_t v) {
    return pv > p || (pv == p && vocab_[v] < vocab_[id]);
  };

  std::size_t ahead = 0;
  // Words never seen after this context score by unigram count alone, which
  // makes "beats" a prefix of order_.
  const auto boundary = std::partition_point(order_.begin(), order_.end(), [&](std::uint32_t v) {
    return beats(prob_id(unigram_[v], 0, ctx), v);
  });
  const std::size_t prefix_len = static_cast<std::size_t>(boundary - order_.begin());
  ahead += prefix_len;
  if (ctx) {
    for (const auto& [v, n] : ctx->next) {
      if (position_[v] < prefix_len) --ahead;  // counted above with the wrong score
      if (v != id && beats(prob_id(unigram_[v], n, ctx), v)) ++ahead;
    }
  }
  return static_cast<int>(ahead) + 1;
}

std::string BigramScorer::top1(std::string_view prefix) const {
  if (vocab_.empty()) return {};
  const ContextStats* ctx = find_context(context_of(prefix));
  std::uint32_t best = order_.front();
  double best_p = prob_id(unigram_[best], 0, ctx);
  if (ctx) {
    if (auto n = ctx->next.find(best); n != ctx->next.end()) {
      best_p = prob_id(unigram_[best], n->second, ctx);
    }
    for (const auto& [v, n] : ctx->next) {
      const double pv = prob_id(unigram_[v], n, ctx);
      if (pv > best_p || (pv == best_p && vocab_[v] < vocab_[best])) {
        best = v;
        best_p = pv;
      }
    }
  }
  return vocab_[best];
}

std::vector<TokenLogprob> BigramScorer::token_logprobs(std::string_view text) const {
  std::vector<TokenLogprob> out;
  if (is_blank(text)) return out;
  std::string prev(kStart);
  const WordSequence seq = segment(text, *stopwords_);
  for (const Word& w : seq.words()) {
    if (w.is_punctuation) {
      if (ends_sentence(w.surface)) prev = kStart;
      continue;
    }
    out.push_back({w.surface, std::log(probability(w.surface, prev))});
    prev = to_lower(w.surface);
  }
  return out;
}

}  // namespace maskmia
