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

#ifndef MASKMIA_TESTS_SUPPORT_FIXTURES_HPP_
#define MASKMIA_TESTS_SUPPORT_FIXTURES_HPP_

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "maskmia/embedding.hpp"
#include "maskmia/lm.hpp"
#include "maskmia/random.hpp"
#include "maskmia/textprep.hpp"

namespace maskmia::testing {

// Last alphanumeric run of the prefix, lower-cased; "<s>" when none.
inline std::string last_run(std::string_view prefix) {
  std::size_t end = prefix.size();
  while (end > 0 && !std::isalnum(static_cast<unsigned char>(prefix[end - 1]))) --end;
  std::size_t begin = end;
  while (begin > 0 && std::isalnum(static_cast<unsigned char>(prefix[begin - 1]))) --begin;
  if (begin == end) return "<s>";
  return to_lower(prefix.substr(begin, end - begin));
}

// Fixed vocabulary; the weight of (context, word) is a hash-derived value
// in (0, 1). Ranks count strictly better words, ties going to the
// lexicographically smaller word. Words outside the vocabulary rank V+1.
class ToyScorer : public LmScorer {
 public:
  explicit ToyScorer(std::vector<std::string> vocabulary, std::uint64_t seed = 1)
      : vocab_(std::move(vocabulary)), seed_(seed) {
    for (auto& w : vocab_) w = to_lower(w);
    std::sort(vocab_.begin(), vocab_.end());
    vocab_.erase(std::unique(vocab_.begin(), vocab_.end()), vocab_.end());
  }

  const std::vector<std::string>& vocabulary() const { return vocab_; }

  double weight(std::string_view word, std::string_view context) const {
    const std::uint64_t h = mix_seed(seed_, std::string(context) + '\x1f' + to_lower(word));
    return (static_cast<double>(h >> 11) + 1.0) * 0x1.0p-53;
  }

  bool known(std::string_view word) const {
    return std::binary_search(vocab_.begin(), vocab_.end(), to_lower(word));
  }

  int rank_of(std::string_view word, std::string_view prefix) const override {
    if (!known(word)) return static_cast<int>(vocab_.size()) + 1;
    const std::string ctx = last_run(prefix);
    const std::string lw = to_lower(word);
    const double p = weight(lw, ctx);
    int ahead = 0;
    for (const auto& v : vocab_) {
      const double q = weight(v, ctx);
      if (q > p || (q == p && v < lw)) ++ahead;
    }
    return ahead + 1;
  }

  std::string top1(std::string_view prefix) const override {
    const std::string ctx = last_run(prefix);
    std::string best;
    double best_p = -1.0;
    for (const auto& v : vocab_) {
      const double q = weight(v, ctx);
      if (q > best_p) {
        best_p = q;
        best = v;
      }
    }
    return best;
  }

  std::vector<TokenLogprob> token_logprobs(std::string_view text) const override {
    std::vector<TokenLogprob> out;
    std::string ctx = "<s>";
    std::string cur;
    auto flush = [&] {
      if (cur.empty()) return;
      out.push_back({cur, std::log(weight(cur, ctx))});
      ctx = to_lower(cur);
      cur.clear();
    };
    for (char c : text) {
      if (std::isalnum(static_cast<unsigned char>(c))) {
        cur += c;
      } else {
        flush();
      }
    }
    flush();
    return out;
  }

 private:
  std::vector<std::string> vocab_;
  std::uint64_t seed_;
};

// Explicit candidate lists per context (last alphanumeric run of the
// prefix). Unlisted words rank after every listed one.
class TableScorer : public LmScorer {
 public:
  void set(std::string context, std::vector<std::pair<std::string, double>> candidates) {
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    table_[std::move(context)] = std::move(candidates);
  }
  int rank_of(std::string_view word, std::string_view prefix) const override {
    const auto& list = table_.at(last_run(prefix));
    for (std::size_t i = 0; i < list.size(); ++i) {
      if (list[i].first == to_lower(word)) return static_cast<int>(i) + 1;
    }
    return static_cast<int>(list.size()) + 1;
  }
  std::string top1(std::string_view prefix) const override {
    return table_.at(last_run(prefix)).front().first;
  }
  std::vector<TokenLogprob> token_logprobs(std::string_view) const override { return {}; }

 private:
  std::map<std::string, std::vector<std::pair<std::string, double>>> table_;
};

// Splits every word longer than `limit` bytes into chunks of `limit`.
class ChunkTokenizer : public TokenizerAdapter {
 public:
  explicit ChunkTokenizer(std::size_t limit) : limit_(limit) {}
  std::vector<std::string> tokenize(std::string_view text) const override {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < text.size(); i += limit_) {
      out.emplace_back(text.substr(i, limit_));
    }
    return out;
  }
  std::string detokenize(std::span<const std::string> tokens) const override {
    std::string s;
    for (const auto& t : tokens) s += t;
    return s;
  }

 private:
  std::size_t limit_;
};

// Unnormalised hashed word counts. Every inner product is a small integer,
// so float scores are exact and any ordering disagreement is a real bug.
class CountEmbedder : public Embedder {
 public:
  explicit CountEmbedder(Eigen::Index dim) : dim_(dim) {}
  Eigen::VectorXf embed(std::string_view text) const override {
    Eigen::VectorXf v = Eigen::VectorXf::Zero(dim_);
    std::string cur;
    auto flush = [&] {
      if (!cur.empty())
        v[static_cast<Eigen::Index>(fnv1a(cur) % static_cast<std::uint64_t>(dim_))] += 1.0f;
      cur.clear();
    };
    for (char c : text) {
      if (std::isspace(static_cast<unsigned char>(c))) {
        flush();
      } else {
        cur += c;
      }
    }
    flush();
    return v;
  }
  Eigen::Index dimension() const override { return dim_; }

 private:
  Eigen::Index dim_;
};

}  // namespace maskmia::testing

#endif  // MASKMIA_TESTS_SUPPORT_FIXTURES_HPP_
