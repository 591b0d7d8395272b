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

#include "maskmia/rag.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "maskmia/error.hpp"
#include "maskmia/random.hpp"
#include "maskmia/resources.hpp"
#include "maskmia/textprep.hpp"

namespace maskmia {
namespace {

std::string match_case(std::string_view pattern, std::string replacement) {
  const auto upper = [](char c) { return std::isupper(static_cast<unsigned char>(c)) != 0; };
  const auto lower = [](char c) { return std::islower(static_cast<unsigned char>(c)) != 0; };
  if (pattern.empty() || !upper(pattern[0])) return replacement;
  bool all_upper = pattern.size() > 1;
  for (char c : pattern) all_upper = all_upper && !lower(c);
  for (std::size_t i = 0; i < replacement.size(); ++i) {
    if (i == 0 || all_upper) {
      replacement[i] = static_cast<char>(std::toupper(static_cast<unsigned char>(replacement[i])));
    }
  }
  return replacement;
}

Corpus paraphrase_if(const Corpus& corpus, const DefenseConfig& defense,
                     const Generator* paraphraser) {
  if (!defense.paraphrase) return corpus;
  return paraphrase_corpus(corpus, paraphraser ? *paraphraser : SynonymParaphraser::bundled());
}

}  // namespace

std::string cloze_query(std::string_view masked_text) {
  std::string q(kClozeInstruction);
  q += "\n\n";
  q += masked_text;
  return q;
}

std::string presence_query(std::string_view doc) {
  std::string q(kPresenceQuestionPrefix);
  q += doc;
  q += kPresenceQuestionSuffix;
  return q;
}

ChatPrompt build_prompt(std::span<const std::string> context_docs, std::string_view query,
                        bool prompt_modification) {
  std::string user(kContextHeader);
  for (std::size_t i = 0; i < context_docs.size(); ++i) {
    if (i > 0) user += kContextSeparator;
    user += context_docs[i];
  }
  user += '\n';
  user += query;
  if (prompt_modification) {
    user += "\n\n";
    user += kNoRepeatInstruction;
  }
  return {std::string(kSystemPrompt), std::move(user)};
}

SynonymParaphraser::SynonymParaphraser(std::map<std::string, std::string> table)
    : table_(std::move(table)) {
  for (const auto& [from, to] : table_) {
    if (from.empty() || to.empty() || from != to_lower(from)) {
      throw InvalidArgument("synonym entries must be non-empty lower-case words: '" + from + "'");
    }
  }
}

SynonymParaphraser SynonymParaphraser::load(const std::filesystem::path& tsv) {
  std::ifstream in(tsv);
  if (!in) throw IoError("cannot open synonym table " + tsv.string());
  std::map<std::string, std::string> table;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size()) {
      throw ParseError(tsv.string() + ":" + std::to_string(line_no) + ": expected word<TAB>word");
    }
    table.emplace(line.substr(0, tab), line.substr(tab + 1));
  }
  return SynonymParaphraser(std::move(table));
}

const SynonymParaphraser& SynonymParaphraser::bundled() {
  static const SynonymParaphraser instance = load(data_file("synonyms_en.tsv"));
  return instance;
}

std::string SynonymParaphraser::paraphrase(std::string_view text) const {
  const WordSequence words = segment(text);
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    out += words.separator_before(i);
    const std::string& surface = words[i].surface;
    auto it = words[i].is_punctuation ? table_.end() : table_.find(to_lower(surface));
    out += it == table_.end() ? surface : match_case(surface, it->second);
  }
  out += words.trailing();
  return out;
}

Generation SynonymParaphraser::generate(const ChatPrompt& prompt) const {
  std::string_view user = prompt.user;
  if (user.starts_with(kParaphrasePrefix)) user.remove_prefix(kParaphrasePrefix.size());
  return {paraphrase(user), std::nullopt};
}

Corpus paraphrase_corpus(const Corpus& corpus, const Generator& paraphraser) {
  std::vector<Document> docs;
  std::vector<std::string> failures;
  for (const Document& d : corpus) {
    try {
      std::string text = paraphraser.generate({"", std::string(kParaphrasePrefix) + d.text}).text;
      if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
        throw BackendError("empty paraphrase");
      }
      docs.push_back({d.id, std::move(text)});
    } catch (const std::exception& e) {
      failures.push_back(d.id + ": " + e.what());
    }
  }
  if (!failures.empty()) {
    std::ostringstream msg;
    msg << failures.size() << " document(s) failed to paraphrase";
    for (const auto& f : failures) msg << "\n  " << f;
    throw BackendError(msg.str());
  }
  return Corpus(std::move(docs));
}

RagSystem::RagSystem(Corpus knowledge, const Embedder& embedder, const Generator& generator,
                     DefenseConfig defense, const Generator* paraphraser)
    : knowledge_(paraphrase_if(knowledge, defense, paraphraser)),
      embedder_(&embedder),
      generator_(&generator),
      defense_(defense),
      index_(build_index(knowledge_, embedder)) {}

RetrievalResult RagSystem::retrieve(std::string_view query, std::size_t k) const {
  return maskmia::retrieve(index_, knowledge_, query, k, *embedder_);
}

RagAnswer RagSystem::answer(std::string_view query, std::size_t k,
                            std::string_view query_id) const {
  RagAnswer out;
  out.retrieval = retrieve(query, k);
  std::vector<std::string> context;
  for (const auto& hit : out.retrieval.hits) context.push_back(hit.document.text);
  if (defense_.rerank_shuffle_seed) {
    Rng rng(mix_seed(*defense_.rerank_shuffle_seed, query));
    shuffle(context, rng);
  }
  out.prompt = build_prompt(context, query, defense_.prompt_modification);
  try {
    Generation g = generator_->generate(out.prompt);
    out.response = std::move(g.text);
    out.logprobs = std::move(g.logprobs);
  } catch (const std::exception& e) {
    throw BackendError("query '" + std::string(query_id) + "': " + e.what());
  }
  return out;
}

}  // namespace maskmia
