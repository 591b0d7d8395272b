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

#ifndef MASKMIA_CORPUS_HPP_
#define MASKMIA_CORPUS_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"

namespace maskmia {

struct Document {
  std::string id;
  std::string text;

  friend bool operator==(const Document&, const Document&) = default;
};

// Ordered, id-unique collection of documents. Immutable once built.
class Corpus {
 public:
  Corpus() = default;
  // Throws InvalidArgument on duplicate ids or blank text.
  explicit Corpus(std::vector<Document> documents);

  const std::vector<Document>& documents() const { return documents_; }
  std::size_t size() const { return documents_.size(); }
  bool empty() const { return documents_.empty(); }
  const Document& operator[](std::size_t i) const { return documents_[i]; }
  auto begin() const { return documents_.begin(); }
  auto end() const { return documents_.end(); }

  bool contains(std::string_view id) const;
  // Throws InvalidArgument if absent.
  const Document& find(std::string_view id) const;

  friend bool operator==(const Corpus& a, const Corpus& b) { return a.documents_ == b.documents_; }

 private:
  std::vector<Document> documents_;
  std::unordered_map<std::string, std::size_t> by_id_;
};

// Reads a JSON Lines file of {"id": ..., "text": ...} records.
// Blank lines are skipped. Errors carry the 1-based line number.
Corpus load_corpus(const std::filesystem::path& path);
Corpus parse_corpus(std::string_view jsonl);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

struct SplitSpec {
  double member_fraction = 0.8;
  std::uint64_t seed = 0;
  std::size_t train_count_per_class = 0;
  std::size_t test_count_per_class = 0;
};

struct MemberSplit {
  Corpus members;
  Corpus non_members;
};

// round-half-up(member_fraction * n)
std::size_t member_count(std::size_t n, double member_fraction);

// Seeded partition of the corpus. Throws InvalidArgument when either side
// would be empty or the fraction lies outside (0, 1).
MemberSplit split_members(const Corpus& corpus, const SplitSpec& spec);

struct LabeledDocument {
  Document document;
  bool member = false;
};

struct EvalSets {
  std::vector<LabeledDocument> train;
  std::vector<LabeledDocument> test;
};

// Draws disjoint, class-balanced train and test sets. Each set lists its
// members first, then its non-members.
EvalSets sample_eval_set(const Corpus& members, const Corpus& non_members, const SplitSpec& spec);

// {"seed", "member_ids", "non_member_ids"}
nlohmann::json split_manifest(const MemberSplit& split, std::uint64_t seed);

}  // namespace maskmia

#endif  // MASKMIA_CORPUS_HPP_
