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

#include "maskmia/oracle_generator.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "maskmia/error.hpp"
#include "maskmia/masker.hpp"
#include "maskmia/rag.hpp"

namespace maskmia {
namespace {

constexpr std::string_view kSelectPrefix = "Select ";
constexpr std::string_view kSelectMarker = " words or phrases from the following document";
constexpr std::string_view kDocumentMarker = "Document: ";
constexpr std::size_t kMaxOpenWords = 200;

std::set<std::string> word_set(std::string_view text) {
  std::set<std::string> out;
  if (is_blank(text)) return out;
  const WordSequence seq = segment(text);
  for (const Word& w : seq.words()) {
    if (!w.is_punctuation) out.insert(to_lower(w.surface));
  }
  return out;
}

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
  if (a.empty() && b.empty()) return 0.0;
  std::size_t common = 0;
  for (const auto& w : a) common += b.count(w);
  return static_cast<double>(common) / static_cast<double>(a.size() + b.size() - common);
}

struct Best {
  std::size_t index = 0;
  double overlap = -1.0;
};

// Highest overlap; the earlier document wins ties.
Best best_match(std::span<const std::string> context, const std::set<std::string>& query) {
  Best best;
  for (std::size_t i = 0; i < context.size(); ++i) {
    const double j = jaccard(word_set(context[i]), query);
    if (j > best.overlap) best = {i, j};
  }
  return best;
}

// A word of the masked text, or a slot (slot > 0).
struct Item {
  int slot = 0;
  std::string lower;
  bool punctuation = false;
  std::size_t begin = 0;  // byte range in the masked text
  std::size_t end = 0;
};

std::vector<Item> cloze_items(std::string_view text) {
  std::vector<Item> items;
  std::size_t pos = 0;
  auto add_words = [&](std::size_t from, std::size_t to) {
    if (is_blank(text.substr(from, to - from))) return;
    const WordSequence seq = segment(text.substr(from, to - from));
    for (const Word& w : seq.words()) {
      items.push_back({0, to_lower(w.surface), w.is_punctuation, from + w.offset, from + w.end()});
    }
  };
  for (const SlotSpan& s : find_slots(text)) {
    add_words(pos, s.begin);
    items.push_back({s.slot, {}, false, s.begin, s.end});
    pos = s.end;
  }
  add_words(pos, text.size());
  return items;
}

// For each item, the index of the aligned target word, if any. Matching
// words score 2, a slot against any word 1; gaps are free. Ties prefer
// the diagonal so slots bind to the word between their neighbours.
std::vector<std::optional<std::size_t>> align(const std::vector<Item>& items,
                                              const std::vector<std::string>& target) {
  const std::size_t n = items.size();
  const std::size_t m = target.size();
  std::vector<int> dp((n + 1) * (m + 1), 0);
  auto at = [&](std::size_t i, std::size_t j) -> int& { return dp[i * (m + 1) + j]; };
  auto pair_score = [&](std::size_t i, std::size_t j) -> int {
    if (items[i].slot > 0) return 1;
    return items[i].lower == target[j] ? 2 : -1;
  };
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      int best = std::max(at(i - 1, j), at(i, j - 1));
      const int s = pair_score(i - 1, j - 1);
      if (s > 0) best = std::max(best, at(i - 1, j - 1) + s);
      at(i, j) = best;
    }
  }
  std::vector<std::optional<std::size_t>> out(n);
  std::size_t i = n, j = m;
  while (i > 0 && j > 0) {
    const int s = pair_score(i - 1, j - 1);
    if (s > 0 && at(i, j) == at(i - 1, j - 1) + s) {
      out[i - 1] = j - 1;
      --i;
      --j;
    } else if (at(i, j) == at(i - 1, j)) {
      --i;
    } else {
      --j;
    }
  }
  return out;
}

bool only_whitespace(std::string_view s) {
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; });
}

std::string strip_suffix(std::string_view text, std::string_view suffix) {
  if (text.ends_with(suffix)) text.remove_suffix(suffix.size());
  while (!text.empty() && (text.back() == '\n' || text.back() == ' ')) text.remove_suffix(1);
  return std::string(text);
}

}  // namespace

double word_jaccard(std::string_view a, std::string_view b) {
  return jaccard(word_set(a), word_set(b));
}

ParsedPrompt parse_rag_prompt(std::string_view user) {
  if (!user.starts_with(kContextHeader)) throw ParseError("prompt lacks a context header");
  user.remove_prefix(kContextHeader.size());
  const std::string body = strip_suffix(user, kNoRepeatInstruction);
  std::string_view view = body;
  std::size_t split = view.rfind(kClozeInstruction);
  if (split == std::string_view::npos) {
    split = view.rfind('\n');
    if (split == std::string_view::npos) throw ParseError("prompt lacks a query line");
    ++split;
  }
  ParsedPrompt out;
  out.query = std::string(view.substr(split));
  std::string_view ctx = view.substr(0, split);
  if (!ctx.empty() && ctx.back() == '\n') ctx.remove_suffix(1);
  std::size_t pos = 0;
  while (!ctx.empty() && pos <= ctx.size()) {
    std::size_t next = ctx.find(kContextSeparator, pos);
    if (next == std::string_view::npos) next = ctx.size();
    if (next > pos) out.context.emplace_back(ctx.substr(pos, next - pos));
    pos = next + kContextSeparator.size();
  }
  return out;
}

OracleGenerator::OracleGenerator(const LmScorer& scorer, OracleConfig config,
                                 const StopwordList& stopwords)
    : scorer_(&scorer), config_(config), stopwords_(&stopwords) {
  if (!(config.threshold >= 0.0 && config.threshold < 1.0)) {
    throw InvalidArgument("oracle threshold must lie in [0, 1)");
  }
}

std::vector<TokenLogprob> OracleGenerator::text_logprobs(std::string_view text) const {
  if (!config_.logprobs) throw CapabilityError("oracle generator configured without logprobs");
  return scorer_->token_logprobs(text);
}

Generation OracleGenerator::generate(const ChatPrompt& prompt) const {
  std::string_view user = prompt.user;
  Generation out;
  if (user.starts_with(kSelectPrefix) && user.find(kSelectMarker) != std::string_view::npos) {
    const std::size_t doc_at = user.find(kDocumentMarker);
    if (doc_at == std::string_view::npos) throw ParseError("mask selection prompt lacks document");
    const int count = std::atoi(std::string(user.substr(kSelectPrefix.size(), 8)).c_str());
    out.text = select_masks(count, user.substr(doc_at + kDocumentMarker.size()));
  } else if (user.starts_with(kParaphrasePrefix)) {
    out.text = std::string(user.substr(kParaphrasePrefix.size()));
  } else if (user.starts_with(kContextHeader)) {
    const ParsedPrompt parsed = parse_rag_prompt(user);
    std::string_view q = parsed.query;
    if (q.starts_with(kClozeInstruction)) {
      q.remove_prefix(kClozeInstruction.size());
      while (!q.empty() && q.front() == '\n') q.remove_prefix(1);
      out.text = answer_cloze(parsed.context, q);
    } else if (q.starts_with(kPresenceQuestionPrefix) && q.ends_with(kPresenceQuestionSuffix)) {
      q.remove_prefix(kPresenceQuestionPrefix.size());
      q.remove_suffix(kPresenceQuestionSuffix.size());
      out.text = answer_yes_no(parsed.context, q);
    } else {
      out.text = answer_open(parsed.context, q);
    }
  } else {
    out.text = answer_open({}, user);
  }
  if (config_.logprobs) out.logprobs = scorer_->token_logprobs(out.text);
  return out;
}

std::string OracleGenerator::answer_cloze(std::span<const std::string> context,
                                          std::string_view masked_text) const {
  const std::vector<Item> items = cloze_items(masked_text);
  std::set<std::string> query_words;
  for (const Item& it : items) {
    if (it.slot == 0 && !it.punctuation) {
      query_words.insert(it.lower);
    }
  }
  std::vector<std::string> target_surface;
  std::vector<std::optional<std::size_t>> aligned(items.size());
  const Best best = best_match(context, query_words);
  if (!context.empty() && best.overlap > config_.threshold) {
    std::vector<std::string> target_lower;
    const WordSequence seq = segment(context[best.index]);
    for (const Word& w : seq.words()) {
      target_surface.push_back(w.surface);
      target_lower.push_back(to_lower(w.surface));
    }
    aligned = align(items, target_lower);
  }

  std::map<int, std::string> answers;
  std::string filled;
  std::size_t pos = 0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const Item& it = items[i];
    if (it.slot == 0 || answers.count(it.slot)) continue;
    filled += masked_text.substr(pos, it.begin - pos);
    std::string ans = aligned[i] ? target_surface[*aligned[i]] : scorer_->top1(filled);
    if (config_.merge_adjacent && aligned[i] && i + 1 < items.size() && items[i + 1].slot > 0 &&
        aligned[i + 1] &&
        only_whitespace(masked_text.substr(it.end, items[i + 1].begin - it.end)) &&
        !answers.count(items[i + 1].slot)) {
      // Two neighbouring gaps read as one phrase: the first absorbs both
      // words, the second takes the phrase that follows.
      const std::size_t next = *aligned[i + 1];
      std::string tail;
      for (std::size_t k = next + 1; k < target_surface.size() && k <= next + 3; ++k) {
        tail += (tail.empty() ? "" : " ") + target_surface[k];
      }
      ans += " " + target_surface[next];
      answers[items[i + 1].slot] = tail.empty() ? target_surface[next] : tail;
    }
    if (config_.autocorrect) ans = config_.autocorrect->correct(ans);
    filled += ans;
    pos = it.end;
    answers[it.slot] = std::move(ans);
  }
  std::ostringstream out;
  bool first = true;
  for (const auto& [slot, ans] : answers) {
    if (!first) out << '\n';
    first = false;
    out << slot_label(slot) << ": " << ans;
  }
  return out.str();
}

std::string OracleGenerator::answer_yes_no(std::span<const std::string> context,
                                           std::string_view doc) const {
  const Best best = best_match(context, word_set(doc));
  return !context.empty() && best.overlap > config_.threshold ? "Yes." : "No.";
}

std::string OracleGenerator::answer_open(std::span<const std::string> context,
                                         std::string_view query) const {
  const std::size_t n = is_blank(query) ? 0 : std::min(kMaxOpenWords, segment(query).size());
  std::string out;
  if (!context.empty()) {
    const Best best = best_match(context, word_set(query));
    const WordSequence seq = segment(context[best.index]);
    for (std::size_t i = 0; i < seq.size() && i < n; ++i) {
      if (i > 0) out += seq.separator_before(i);
      out += seq[i].surface;
    }
    return out;
  }
  std::string running(query);
  for (std::size_t i = 0; i < n; ++i) {
    const std::string next = scorer_->top1(running);
    if (!out.empty()) out += ' ';
    out += next;
    running += ' ' + next;
  }
  return out;
}

std::string OracleGenerator::select_masks(int mask_count, std::string_view doc) const {
  if (is_blank(doc)) throw ParseError("mask selection prompt has an empty document");
  const WordSequence seq = segment(doc, *stopwords_);
  std::vector<std::pair<int, std::size_t>> ranked;  // (rank, word index)
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (seq[i].is_punctuation || seq[i].is_stopword) continue;
    ranked.emplace_back(scorer_->rank_of(seq[i].surface, doc.substr(0, seq[i].offset)), i);
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  if (mask_count >= 0 && ranked.size() > static_cast<std::size_t>(mask_count)) {
    ranked.resize(static_cast<std::size_t>(mask_count));
  }
  std::vector<std::size_t> chosen;
  for (const auto& r : ranked) chosen.push_back(r.second);
  std::sort(chosen.begin(), chosen.end());

  std::ostringstream list;
  std::string rewritten;
  std::size_t pos = 0;
  int slot = 0;
  for (std::size_t i : chosen) {
    ++slot;
    list << slot << ". " << seq[i].surface << '\n';
    rewritten += doc.substr(pos, seq[i].offset - pos);
    rewritten += slot_label(slot);
    pos = seq[i].end();
  }
  rewritten += doc.substr(pos);
  return list.str() + "\n" + rewritten;
}

}  // namespace maskmia
