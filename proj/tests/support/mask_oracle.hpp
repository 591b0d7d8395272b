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

#ifndef MASKMIA_TESTS_SUPPORT_MASK_ORACLE_HPP_
#define MASKMIA_TESTS_SUPPORT_MASK_ORACLE_HPP_

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "maskmia/lm.hpp"
#include "maskmia/textprep.hpp"

namespace maskmia::testing {

// Exhaustive sweep: every eligible word of every subtext is ranked from
// scratch and the largest rank wins, earliest position on ties. Earlier
// masks appear in the prefix as "[Mask]". No spelling correction. Returns
// nullopt when some subtext has no eligible word.
inline std::optional<std::vector<std::size_t>> exhaustive_mask_positions(
    const std::string& text, int mask_count, const LmScorer& scorer,
    const TokenizerAdapter& tokenizer) {
  const WordSequence seq = segment(text);
  const std::size_t n = seq.size();
  const std::size_t m = static_cast<std::size_t>(mask_count);
  std::vector<std::size_t> picked;
  std::set<std::size_t> masked;

  auto prefix_before = [&](std::size_t j) {
    std::string out;
    std::size_t pos = 0;
    for (std::size_t k : picked) {  // picked is increasing
      if (seq[k].offset >= seq[j].offset) break;
      out += text.substr(pos, seq[k].offset - pos) + "[Mask]";
      pos = seq[k].offset + seq[k].surface.size();
    }
    return out + text.substr(pos, seq[j].offset - pos);
  };

  for (std::size_t s = 0; s < m; ++s) {
    const std::size_t lo = s * (n / m);
    const std::size_t hi = s + 1 == m ? n : (s + 1) * (n / m);
    std::vector<std::pair<int, std::size_t>> candidates;
    for (std::size_t j = lo; j < hi; ++j) {
      if (seq[j].is_punctuation || seq[j].is_stopword) continue;
      if (masked.contains(j + 1) || (j > 0 && masked.contains(j - 1))) continue;
      const std::string prefix = prefix_before(j);
      const auto tokens = tokenizer.tokenize(seq[j].surface);
      int rank = 0;
      if (tokens.size() >= 2) {
        std::string running = prefix;
        for (const auto& t : tokens) {
          rank = std::max(rank, scorer.rank_of(t, running));
          running += t;
        }
      } else {
        rank = scorer.rank_of(seq[j].surface, prefix);
      }
      candidates.emplace_back(rank, j);
    }
    if (candidates.empty()) return std::nullopt;
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    picked.push_back(candidates.front().second);
    masked.insert(candidates.front().second);
  }
  return picked;
}

}  // namespace maskmia::testing

#endif  // MASKMIA_TESTS_SUPPORT_MASK_ORACLE_HPP_
