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

#ifndef MASKMIA_TEXTPREP_HPP_
#define MASKMIA_TEXTPREP_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "maskmia/corpus.hpp"

namespace maskmia {

std::string to_lower(std::string_view s);
// Empty or whitespace only; such text cannot be segmented.
bool is_blank(std::string_view s);

// One-word-per-line list; '#' starts a comment line.
class StopwordList {
 public:
  StopwordList() = default;
  explicit StopwordList(std::vector<std::string> words);
  static StopwordList load(const std::filesystem::path& path);
  // data/stopwords_en.txt
  static const StopwordList& bundled();

  bool contains(std::string_view word) const;  // case-insensitive
  std::size_t size() const { return words_.size(); }
  std::vector<std::string> sorted_words() const;
  // FNV-1a over the sorted list, echoed in reports.
  std::uint64_t fingerprint() const;

 private:
  std::unordered_set<std::string> words_;
};

struct Word {
  std::string surface;
  std::size_t offset = 0;  // byte offset into the source text
  bool is_stopword = false;
  bool is_punctuation = false;

  std::size_t end() const { return offset + surface.size(); }
};

// Words and punctuation runs of a text, with enough bookkeeping to rebuild
// the text byte-for-byte.
class WordSequence {
 public:
  WordSequence(std::string text, std::vector<Word> words)
      : text_(std::move(text)), words_(std::move(words)) {}

  const std::string& text() const { return text_; }
  const std::vector<Word>& words() const { return words_; }
  std::size_t size() const { return words_.size(); }
  const Word& operator[](std::size_t i) const { return words_[i]; }

  // Text between word i-1 (or the start) and word i.
  std::string_view separator_before(std::size_t i) const;
  std::string_view trailing() const;
  std::string reconstruct() const;

 private:
  std::string text_;
  std::vector<Word> words_;
};

// Splits text into words and punctuation runs. A word is a run of
// alphanumerics (any byte >= 0x80 counts as a letter) that may be joined
// internally by '-', '/' or '\''; '.' joins digits. Every other non-space
// run is punctuation. Throws InvalidArgument on blank input.
WordSequence segment(std::string_view text,
                     const StopwordList& stopwords = StopwordList::bundled());

// True for a word made only of ASCII letters.
bool is_alphabetic(std::string_view word);

class TokenizerAdapter {
 public:
  virtual ~TokenizerAdapter() = default;
  // Tokens whose concatenation, after detokenize(), equals the input.
  virtual std::vector<std::string> tokenize(std::string_view text) const = 0;
  virtual std::string detokenize(std::span<const std::string> tokens) const = 0;
  virtual bool concurrent_safe() const { return true; }
};

// Greedy longest-match subword tokenizer over a ranked vocabulary file
// (one token per line). A single space before a token is folded into it
// as the marker "Ġ", GPT-2 style. Matching is case-insensitive; tokens
// keep the input's case.
class GreedySubwordTokenizer : public TokenizerAdapter {
 public:
  static constexpr std::string_view kSpaceMarker = "\xC4\xA0";

  explicit GreedySubwordTokenizer(std::vector<std::string> vocabulary);
  static GreedySubwordTokenizer load(const std::filesystem::path& path);
  static const GreedySubwordTokenizer& bundled();

  std::vector<std::string> tokenize(std::string_view text) const override;
  std::string detokenize(std::span<const std::string> tokens) const override;
  std::size_t vocabulary_size() const { return vocab_.size(); }

 private:
  void split_run(std::string_view run, bool marked, std::vector<std::string>& out) const;

  std::unordered_set<std::string> vocab_;
  std::size_t longest_ = 1;
};

class SpellCorrector {
 public:
  virtual ~SpellCorrector() = default;
  // Returns a phrase with the same number of whitespace-delimited words.
  virtual std::string correct(std::string_view phrase) const = 0;
  virtual bool concurrent_safe() const { return true; }
};

// Leaves everything unchanged.
class IdentityCorrector : public SpellCorrector {
 public:
  std::string correct(std::string_view phrase) const override;
};

// Optimal-string-alignment Damerau-Levenshtein distance. Returns
// `cutoff + 1` as soon as the distance provably exceeds cutoff.
std::size_t damerau_levenshtein(std::string_view a, std::string_view b,
                                std::size_t cutoff = SIZE_MAX);

// Dictionary corrector: an alphabetic word missing from the lexicon is
// replaced by the lexicon entry at the smallest distance (<= max_distance),
// preferring higher frequency, then lexicographic order. Case pattern
// (lower/Capitalized/UPPER) is carried over. Other words pass through.
class DictionaryCorrector : public SpellCorrector {
 public:
  explicit DictionaryCorrector(std::unordered_map<std::string, std::uint64_t> lexicon,
                               std::size_t max_distance = 2);
  // "word<TAB>count" per line.
  static DictionaryCorrector load(const std::filesystem::path& path);
  static const DictionaryCorrector& bundled();

  std::string correct(std::string_view phrase) const override;
  std::string correct_word(std::string_view word) const;
  bool known(std::string_view word) const;
  void add_word(std::string word, std::uint64_t count);

 private:
  struct Entry {
    std::string word;
    std::uint64_t count;
    std::array<std::uint8_t, 26> histogram;
  };
  std::string lookup(const std::string& lower) const;

  std::unordered_map<std::string, std::uint64_t> lexicon_;
  std::vector<std::vector<Entry>> by_length_;
  std::size_t max_distance_;
  struct Cache {
    std::mutex mutex;
    std::unordered_map<std::string, std::string> entries;
  };
  std::unique_ptr<Cache> cache_ = std::make_unique<Cache>();
};

struct FragmentedWord {
  std::string surface;
  std::size_t word_index = 0;
  std::vector<std::string> tokens;  // tokenizer output for `surface`, size >= 2
  std::optional<std::string> corrected;

  std::size_t token_count() const { return tokens.size(); }
};

// Words (in document order) whose tokenization spans two or more tokens.
// Hyphen/slash compounds are single words, so their pieces are merged.
std::vector<FragmentedWord> extract_fragmented_words(const WordSequence& words,
                                                     const TokenizerAdapter& tokenizer);
std::vector<FragmentedWord> extract_fragmented_words(
    const Document& doc, const TokenizerAdapter& tokenizer,
    const StopwordList& stopwords = StopwordList::bundled());

// Runs the corrector over [w(i-2), w(i-1), w(i)] (punctuation skipped,
// shorter at the start) for each fragment and records the corrected third
// word when it differs from the surface.
std::vector<FragmentedWord> correct_words(const WordSequence& words,
                                          std::vector<FragmentedWord> fragmented,
                                          const SpellCorrector& corrector);
std::vector<FragmentedWord> correct_words(const Document& doc,
                                          std::vector<FragmentedWord> fragmented,
                                          const SpellCorrector& corrector,
                                          const StopwordList& stopwords = StopwordList::bundled());

}  // namespace maskmia

#endif  // MASKMIA_TEXTPREP_HPP_
