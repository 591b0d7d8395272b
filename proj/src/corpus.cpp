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

#include "maskmia/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "maskmia/error.hpp"
#include "maskmia/random.hpp"

namespace maskmia {
namespace {

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

std::vector<Document> draw(const Corpus& pool, std::vector<std::size_t>& order, std::size_t begin,
                           std::size_t count) {
  std::vector<Document> out;
  out.reserve(count);
  for (std::size_t i = begin; i < begin + count; ++i) {
    out.push_back(pool[order[i]]);
  }
  return out;
}

}  // namespace

Corpus::Corpus(std::vector<Document> documents) : documents_(std::move(documents)) {
  by_id_.reserve(documents_.size());
  for (std::size_t i = 0; i < documents_.size(); ++i) {
    const Document& d = documents_[i];
    if (is_blank(d.text)) {
      throw InvalidArgument("document '" + d.id + "' has empty text");
    }
    if (!by_id_.emplace(d.id, i).second) {
      throw InvalidArgument("duplicate document id '" + d.id + "'");
    }
  }
}

bool Corpus::contains(std::string_view id) const {
  return by_id_.find(std::string(id)) != by_id_.end();
}

const Document& Corpus::find(std::string_view id) const {
  auto it = by_id_.find(std::string(id));
  if (it == by_id_.end()) {
    throw InvalidArgument("unknown document id '" + std::string(id) + "'");
  }
  return documents_[it->second];
}

Corpus parse_corpus(std::string_view jsonl) {
  std::vector<Document> docs;
  std::unordered_map<std::string, std::size_t> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= jsonl.size()) {
    std::size_t end = jsonl.find('\n', pos);
    if (end == std::string_view::npos) end = jsonl.size();
    std::string_view line = jsonl.substr(pos, end - pos);
    ++line_no;
    pos = end + 1;
    if (is_blank(line)) continue;
    const std::string where = "line " + std::to_string(line_no);
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(where + ": " + e.what());
    }
    if (!rec.is_object() || !rec.contains("id") || !rec["id"].is_string() ||
        !rec.contains("text") || !rec["text"].is_string()) {
      throw ParseError(where + ": record needs string fields \"id\" and \"text\"");
    }
    Document d{rec["id"].get<std::string>(), rec["text"].get<std::string>()};
    if (is_blank(d.text)) throw ParseError(where + ": empty text");
    if (auto [it, fresh] = seen.emplace(d.id, line_no); !fresh) {
      throw ParseError(where + ": duplicate id '" + d.id + "' (first on line " +
                       std::to_string(it->second) + ")");
    }
    docs.push_back(std::move(d));
  }
  return Corpus(std::move(docs));
}

Corpus load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open corpus file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("read failure on " + path.string());
  return parse_corpus(buf.str());
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  for (const Document& d : corpus) {
    out << nlohmann::json{{"id", d.id}, {"text", d.text}}.dump() << '\n';
  }
}

std::size_t member_count(std::size_t n, double member_fraction) {
  return static_cast<std::size_t>(std::floor(member_fraction * static_cast<double>(n) + 0.5));
}

MemberSplit split_members(const Corpus& corpus, const SplitSpec& spec) {
  if (!(spec.member_fraction > 0.0 && spec.member_fraction < 1.0)) {
    throw InvalidArgument("member_fraction must lie in (0, 1)");
  }
  if (corpus.empty()) throw InvalidArgument("cannot split an empty corpus");
  const std::size_t n = corpus.size();
  const std::size_t n_members = member_count(n, spec.member_fraction);
  if (n_members == 0 || n_members == n) {
    throw InvalidArgument("corpus of " + std::to_string(n) +
                          " documents is too small for member_fraction " +
                          std::to_string(spec.member_fraction));
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(mix_seed(spec.seed, "split"));
  shuffle(order, rng);
  // Each side keeps corpus order so manifests are stable to read.
  std::vector<std::size_t> mem(order.begin(), order.begin() + n_members);
  std::vector<std::size_t> non(order.begin() + n_members, order.end());
  std::sort(mem.begin(), mem.end());
  std::sort(non.begin(), non.end());
  std::vector<Document> a, b;
  for (std::size_t i : mem) a.push_back(corpus[i]);
  for (std::size_t i : non) b.push_back(corpus[i]);
  return {Corpus(std::move(a)), Corpus(std::move(b))};
}

EvalSets sample_eval_set(const Corpus& members, const Corpus& non_members, const SplitSpec& spec) {
  const std::size_t need = spec.train_count_per_class + spec.test_count_per_class;
  if (members.size() < need) {
    throw InvalidArgument("members insufficient: need " + std::to_string(need) + ", have " +
                          std::to_string(members.size()));
  }
  if (non_members.size() < need) {
    throw InvalidArgument("non-members insufficient: need " + std::to_string(need) + ", have " +
                          std::to_string(non_members.size()));
  }
  auto permutation = [&](std::size_t n, std::string_view salt) {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    Rng rng(mix_seed(spec.seed, salt));
    shuffle(order, rng);
    return order;
  };
  auto mem_order = permutation(members.size(), "eval-members");
  auto non_order = permutation(non_members.size(), "eval-non-members");

  EvalSets sets;
  auto fill = [&](std::vector<LabeledDocument>& out, std::size_t begin, std::size_t count) {
    for (Document& d : draw(members, mem_order, begin, count)) {
      out.push_back({std::move(d), true});
    }
    for (Document& d : draw(non_members, non_order, begin, count)) {
      out.push_back({std::move(d), false});
    }
  };
  fill(sets.train, 0, spec.train_count_per_class);
  fill(sets.test, spec.train_count_per_class, spec.test_count_per_class);
  return sets;
}

nlohmann::json split_manifest(const MemberSplit& split, std::uint64_t seed) {
  nlohmann::json m;
  m["seed"] = seed;
  m["member_ids"] = nlohmann::json::array();
  m["non_member_ids"] = nlohmann::json::array();
  for (const Document& d : split.members) m["member_ids"].push_back(d.id);
  for (const Document& d : split.non_members) m["non_member_ids"].push_back(d.id);
  return m;
}

}  // namespace maskmia
