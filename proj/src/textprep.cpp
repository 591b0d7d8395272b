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

#include "maskmia/textprep.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <tuple>

#include "maskmia/error.hpp"
#include "maskmia/random.hpp"
#include "maskmia/resources.hpp"

namespace maskmia {
namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

bool is_word_char(char c) {
  const auto u = static_cast<unsigned char>(c);
  return std::isalnum(u) != 0 || u >= 0x80 || c == '_';
}

bool is_run_char(char c) {
  const auto u = static_cast<unsigned char>(c);
  return std::isalnum(u) != 0 || u >= 0x80;
}

std::size_t utf8_length(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead >> 5) == 0x6) return 2;
  if ((lead >> 4) == 0xE) return 3;
  if ((lead >> 3) == 0x1E) return 4;
  return 1;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

std::vector<std::string> split_whitespace(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    std::size_t j = i;
    while (j < s.size() && !is_space(s[j])) ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::array<std::uint8_t, 26> letter_histogram(std::string_view w) {
  std::array<std::uint8_t, 26> h{};
  for (char c : w) {
    if (c >= 'a' && c <= 'z') ++h[c - 'a'];
  }
  return h;
}

std::string apply_case_pattern(std::string_view original, std::string word) {
  const bool all_upper =
      original.size() > 1 && std::all_of(original.begin(), original.end(), [](char c) {
        return std::isupper(static_cast<unsigned char>(c)) != 0;
      });
  if (all_upper) {
    for (char& c : word) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  } else if (!original.empty() && std::isupper(static_cast<unsigned char>(original[0])) != 0 &&
             !word.empty()) {
    word[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(word[0])));
  }
  return word;
}

}  // namespace

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

bool is_alphabetic(std::string_view word) {
  return !word.empty() && std::all_of(word.begin(), word.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
  });
}

// ---------------------------------------------------------------------------
// Stopwords

StopwordList::StopwordList(std::vector<std::string> words) {
  for (auto& w : words) words_.insert(to_lower(w));
}

StopwordList StopwordList::load(const std::filesystem::path& path) {
  std::vector<std::string> words;
  for (std::string& line : read_lines(path)) {
    if (line.empty() || line[0] == '#') continue;
    words.push_back(std::move(line));
  }
  return StopwordList(std::move(words));
}

const StopwordList& StopwordList::bundled() {
  static const StopwordList list = load(data_file("stopwords_en.txt"));
  return list;
}

bool StopwordList::contains(std::string_view word) const {
  return words_.count(to_lower(word)) != 0;
}

std::vector<std::string> StopwordList::sorted_words() const {
  std::vector<std::string> sorted(words_.begin(), words_.end());
  std::sort(sorted.begin(), sorted.end());
  return sorted;
}

std::uint64_t StopwordList::fingerprint() const {
  const std::vector<std::string> sorted = sorted_words();
  std::uint64_t h = fnv1a("");
  for (const auto& w : sorted) h = fnv1a(w + "\n", h);
  return h;
}

// ---------------------------------------------------------------------------
// Segmentation

std::string_view WordSequence::separator_before(std::size_t i) const {
  const std::size_t start = i == 0 ? 0 : words_[i - 1].end();
  return std::string_view(text_).substr(start, words_[i].offset - start);
}

std::string_view WordSequence::trailing() const {
  const std::size_t start = words_.empty() ? 0 : words_.back().end();
  return std::string_view(text_).substr(start);
}

std::string WordSequence::reconstruct() const {
  std::string out;
  out.reserve(text_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) {
    out += separator_before(i);
    out += words_[i].surface;
  }
  out += trailing();
  return out;
}

bool is_blank(std::string_view s) { return std::all_of(s.begin(), s.end(), is_space); }

WordSequence segment(std::string_view text, const StopwordList& stopwords) {
  if (is_blank(text)) {
    throw InvalidArgument("cannot segment empty text");
  }
  std::vector<Word> words;
  const std::size_t n = text.size();
  std::size_t i = 0;
  while (i < n) {
    if (is_space(text[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    Word w;
    w.offset = i;
    if (is_word_char(text[i])) {
      for (;;) {
        while (j < n && is_word_char(text[j])) ++j;
        if (j + 1 < n && (text[j] == '-' || text[j] == '/' || text[j] == '\'') &&
            is_word_char(text[j + 1])) {
          ++j;
          continue;
        }
        if (j + 1 < n && text[j] == '.' && is_digit(text[j - 1]) && is_digit(text[j + 1])) {
          ++j;
          continue;
        }
        break;
      }
      w.surface = std::string(text.substr(i, j - i));
      w.is_punctuation = std::none_of(w.surface.begin(), w.surface.end(), is_run_char);
      w.is_stopword = !w.is_punctuation && stopwords.contains(w.surface);
    } else {
      while (j < n && !is_space(text[j]) && !is_word_char(text[j])) ++j;
      w.surface = std::string(text.substr(i, j - i));
      w.is_punctuation = true;
    }
    words.push_back(std::move(w));
    i = j;
  }
  return WordSequence(std::string(text), std::move(words));
}

// ---------------------------------------------------------------------------
// Tokenizer

GreedySubwordTokenizer::GreedySubwordTokenizer(std::vector<std::string> vocabulary) {
  for (auto& tok : vocabulary) {
    if (tok.empty()) continue;
    longest_ = std::max(longest_, tok.size());
    vocab_.insert(to_lower(tok));
  }
}

GreedySubwordTokenizer GreedySubwordTokenizer::load(const std::filesystem::path& path) {
  return GreedySubwordTokenizer(read_lines(path));
}

const GreedySubwordTokenizer& GreedySubwordTokenizer::bundled() {
  static const GreedySubwordTokenizer tok = load(data_file("vocab_en.txt"));
  return tok;
}

void GreedySubwordTokenizer::split_run(std::string_view run, bool marked,
                                       std::vector<std::string>& out) const {
  const std::string lower = to_lower(run);
  auto emit = [&](std::size_t pos, std::size_t len) {
    std::string tok = marked ? std::string(kSpaceMarker) : std::string();
    tok += run.substr(pos, len);
    out.push_back(std::move(tok));
    marked = false;
  };
  if (vocab_.count(lower) != 0) {
    emit(0, run.size());
    return;
  }
  std::size_t pos = 0;
  while (pos < run.size()) {
    std::size_t take = 0;
    for (std::size_t len = std::min(longest_, run.size() - pos); len >= 1; --len) {
      if (vocab_.count(lower.substr(pos, len)) != 0) {
        take = len;
        break;
      }
    }
    if (take == 0) {
      take = std::min(utf8_length(static_cast<unsigned char>(run[pos])), run.size() - pos);
    }
    emit(pos, take);
    pos += take;
  }
}

std::vector<std::string> GreedySubwordTokenizer::tokenize(std::string_view text) const {
  std::vector<std::string> out;
  const std::size_t n = text.size();
  std::size_t i = 0;
  bool marked = false;
  while (i < n) {
    const char c = text[i];
    if (c == ' ' && !marked && i + 1 < n && !is_space(text[i + 1])) {
      marked = true;
      ++i;
      continue;
    }
    if (is_space(c)) {
      out.emplace_back(1, c);
      ++i;
      continue;
    }
    if (is_run_char(c)) {
      std::size_t j = i;
      while (j < n && is_run_char(text[j])) ++j;
      split_run(text.substr(i, j - i), marked, out);
      i = j;
    } else {
      std::string tok = marked ? std::string(kSpaceMarker) : std::string();
      tok += c;
      out.push_back(std::move(tok));
      ++i;
    }
    marked = false;
  }
  return out;
}

std::string GreedySubwordTokenizer::detokenize(std::span<const std::string> tokens) const {
  std::string out;
  for (const auto& tok : tokens) {
    if (tok.starts_with(kSpaceMarker)) {
      out += ' ';
      out += std::string_view(tok).substr(kSpaceMarker.size());
    } else {
      out += tok;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Spelling correction

std::string IdentityCorrector::correct(std::string_view phrase) const {
  return std::string(phrase);
}

std::size_t damerau_levenshtein(std::string_view a, std::string_view b, std::size_t cutoff) {
  const std::size_t n = a.size(), m = b.size();
  const std::size_t diff = n > m ? n - m : m - n;
  if (diff > cutoff) return cutoff == SIZE_MAX ? diff : cutoff + 1;
  std::vector<std::size_t> prev2(m + 1), prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    std::size_t row_min = cur[0];
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t cost = a[i - 1] == b[j - 1] ? 0 : 1;
      std::size_t v = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost});
      if (i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1]) {
        v = std::min(v, prev2[j - 2] + 1);
      }
      cur[j] = v;
      row_min = std::min(row_min, v);
    }
    if (cutoff != SIZE_MAX && row_min > cutoff) return cutoff + 1;
    std::swap(prev2, prev);
    std::swap(prev, cur);
  }
  return cutoff != SIZE_MAX && prev[m] > cutoff ? cutoff + 1 : prev[m];
}

DictionaryCorrector::DictionaryCorrector(std::unordered_map<std::string, std::uint64_t> lexicon,
                                         std::size_t max_distance)
    : max_distance_(max_distance) {
  for (auto& [w, c] : lexicon) add_word(w, c);
}

void DictionaryCorrector::add_word(std::string word, std::uint64_t count) {
  word = to_lower(word);
  if (!is_alphabetic(word)) return;
  auto [it, fresh] = lexicon_.emplace(word, count);
  if (!fresh) {
    it->second = std::max(it->second, count);
    for (auto& e : by_length_[word.size()]) {
      if (e.word == word) e.count = it->second;
    }
  } else {
    if (by_length_.size() <= word.size()) by_length_.resize(word.size() + 1);
    by_length_[word.size()].push_back({word, count, letter_histogram(word)});
  }
  std::lock_guard lock(cache_->mutex);
  cache_->entries.clear();
}

DictionaryCorrector DictionaryCorrector::load(const std::filesystem::path& path) {
  std::unordered_map<std::string, std::uint64_t> lexicon;
  std::size_t line_no = 0;
  for (const std::string& line : read_lines(path)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected word<TAB>count");
    }
    lexicon[line.substr(0, tab)] = std::stoull(line.substr(tab + 1));
  }
  return DictionaryCorrector(std::move(lexicon));
}

const DictionaryCorrector& DictionaryCorrector::bundled() {
  static const DictionaryCorrector corrector = load(data_file("lexicon_en.txt"));
  return corrector;
}

bool DictionaryCorrector::known(std::string_view word) const {
  return lexicon_.count(to_lower(word)) != 0;
}

std::string DictionaryCorrector::lookup(const std::string& lower) const {
  {
    std::lock_guard lock(cache_->mutex);
    if (auto it = cache_->entries.find(lower); it != cache_->entries.end()) {
      return it->second;
    }
  }
  const auto hist = letter_histogram(lower);
  const Entry* best = nullptr;
  std::size_t best_dist = max_distance_ + 1;
  const std::size_t lo = lower.size() > max_distance_ ? lower.size() - max_distance_ : 1;
  const std::size_t hi =
      std::min(lower.size() + max_distance_, by_length_.empty() ? 0 : by_length_.size() - 1);
  for (std::size_t len = lo; len <= hi; ++len) {
    for (const Entry& e : by_length_[len]) {
      std::size_t l1 = 0;
      for (std::size_t k = 0; k < 26; ++k) {
        l1 += hist[k] > e.histogram[k] ? hist[k] - e.histogram[k] : e.histogram[k] - hist[k];
      }
      if (l1 > 2 * max_distance_) continue;
      const std::size_t d = damerau_levenshtein(lower, e.word, std::min(best_dist, max_distance_));
      if (d > max_distance_) continue;
      if (best == nullptr ||
          std::make_tuple(d, ~e.count, std::string_view(e.word)) <
              std::make_tuple(best_dist, ~best->count, std::string_view(best->word))) {
        best = &e;
        best_dist = d;
      }
    }
  }
  std::string result = best ? best->word : lower;
  std::lock_guard lock(cache_->mutex);
  cache_->entries.emplace(lower, result);
  return result;
}

std::string DictionaryCorrector::correct_word(std::string_view word) const {
  if (!is_alphabetic(word)) return std::string(word);
  const std::string lower = to_lower(word);
  if (lexicon_.count(lower) != 0) return std::string(word);
  const std::string cand = lookup(lower);
  if (cand == lower) return std::string(word);
  return apply_case_pattern(word, cand);
}

std::string DictionaryCorrector::correct(std::string_view phrase) const {
  std::string out;
  for (const std::string& w : split_whitespace(phrase)) {
    if (!out.empty()) out += ' ';
    out += correct_word(w);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Fragmented words

std::vector<FragmentedWord> extract_fragmented_words(const WordSequence& words,
                                                     const TokenizerAdapter& tokenizer) {
  std::vector<FragmentedWord> out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    const Word& w = words[i];
    if (w.is_punctuation) continue;
    auto tokens = tokenizer.tokenize(w.surface);
    if (tokens.size() >= 2) {
      out.push_back({w.surface, i, std::move(tokens), std::nullopt});
    }
  }
  return out;
}

std::vector<FragmentedWord> extract_fragmented_words(const Document& doc,
                                                     const TokenizerAdapter& tokenizer,
                                                     const StopwordList& stopwords) {
  return extract_fragmented_words(segment(doc.text, stopwords), tokenizer);
}

std::vector<FragmentedWord> correct_words(const WordSequence& words,
                                          std::vector<FragmentedWord> fragmented,
                                          const SpellCorrector& corrector) {
  for (FragmentedWord& f : fragmented) {
    if (f.word_index >= words.size() || words[f.word_index].surface != f.surface) {
      throw InvalidArgument("fragment '" + f.surface + "' does not match word " +
                            std::to_string(f.word_index));
    }
    std::vector<std::string_view> window;
    for (std::size_t k = f.word_index; k-- > 0 && window.size() < 2;) {
      if (!words[k].is_punctuation) window.push_back(words[k].surface);
    }
    std::reverse(window.begin(), window.end());
    window.push_back(f.surface);
    std::string phrase;
    for (auto w : window) {
      if (!phrase.empty()) phrase += ' ';
      phrase += w;
    }
    std::string fixed;
    try {
      fixed = corrector.correct(phrase);
    } catch (const std::exception& e) {
      throw Error("spell correction failed at word index " + std::to_string(f.word_index) + ": " +
                  e.what());
    }
    const auto out_words = split_whitespace(fixed);
    if (out_words.size() != window.size()) {
      throw Error("spell corrector changed the word count at word index " +
                  std::to_string(f.word_index));
    }
    if (out_words.back() != f.surface) {
      f.corrected = out_words.back();
    } else {
      f.corrected.reset();
    }
  }
  return fragmented;
}

std::vector<FragmentedWord> correct_words(const Document& doc,
                                          std::vector<FragmentedWord> fragmented,
                                          const SpellCorrector& corrector,
                                          const StopwordList& stopwords) {
  return correct_words(segment(doc.text, stopwords), std::move(fragmented), corrector);
}

}  // namespace maskmia
