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

#include "maskmia/config.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "maskmia/error.hpp"
#include "maskmia/oracle_generator.hpp"
#include "maskmia/random.hpp"
#include "maskmia/resources.hpp"
#include "maskmia/synth.hpp"

namespace maskmia {
namespace {

using nlohmann::json;

// Collects every problem in one pass so the error names all bad fields.
class FieldReader {
 public:
  explicit FieldReader(std::vector<std::string>& problems) : problems_(problems) {}

  // Parsed text yields unsigned numbers; json built in code may hold signed ones.
  static bool is_count(const json& v) {
    return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
  }

  // Returns the section object, or nullptr when absent or ill-typed.
  const json* section(const json& parent, const std::string& key, const std::string& path) {
    if (!parent.contains(key)) return nullptr;
    const json& s = parent.at(key);
    if (!s.is_object()) {
      problems_.push_back(path + " must be an object");
      return nullptr;
    }
    return &s;
  }

  void allow(const json& obj, const std::string& path, std::initializer_list<const char*> keys) {
    const std::set<std::string> known(keys.begin(), keys.end());
    for (const auto& [key, value] : obj.items()) {
      if (!known.contains(key)) problems_.push_back(join(path, key) + " is not a recognized field");
    }
  }

  template <typename T>
  void read(const json& obj, const std::string& path, const char* key, T& out) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    const std::string where = join(path, key);
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) return bad(where, "a boolean");
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) return bad(where, "a number");
    } else if constexpr (std::is_unsigned_v<T>) {
      if (!is_count(v)) return bad(where, "a non-negative integer");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) return bad(where, "an integer");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) return bad(where, "a string");
    } else if constexpr (std::is_same_v<T, std::filesystem::path>) {
      if (!v.is_string()) return bad(where, "a path string");
      out = v.get<std::string>();
      return;
    }
    out = v.get<T>();
  }

  template <typename T>
  void read_list(const json& obj, const std::string& path, const char* key, std::vector<T>& out) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    const std::string where = join(path, key);
    if (!v.is_array()) return bad(where, "an array");
    std::vector<T> values;
    for (const json& e : v) {
      const bool ok = std::is_floating_point_v<T> ? e.is_number()
                      : std::is_unsigned_v<T>     ? is_count(e)
                                                  : e.is_number_integer();
      if (!ok) return bad(where, "an array of numbers of the right kind");
      values.push_back(e.get<T>());
    }
    out = std::move(values);
  }

  void bad(const std::string& where, const char* what) {
    problems_.push_back(where + " must be " + what);
  }

 private:
  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }
  std::vector<std::string>& problems_;
};

[[noreturn]] void fail(const std::vector<std::string>& problems) {
  std::string msg = "invalid configuration:";
  for (const auto& p : problems) msg += "\n  " + p;
  throw ConfigError(msg);
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t file_fingerprint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return fnv1a(bytes);
}

std::vector<LabeledDocument> label_all(const MemberSplit& split) {
  std::vector<LabeledDocument> out;
  for (const Document& d : split.members) out.push_back({d, true});
  for (const Document& d : split.non_members) out.push_back({d, false});
  return out;
}

void sort_by_id(std::vector<LabeledDocument>& docs) {
  std::sort(docs.begin(), docs.end(), [](const LabeledDocument& a, const LabeledDocument& b) {
    return a.document.id < b.document.id;
  });
}

}  // namespace

RunConfig RunConfig::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("invalid configuration:\n  top level must be an object");
  std::vector<std::string> problems;
  FieldReader r(problems);
  RunConfig c;
  r.allow(j, "",
          {"corpus", "output_dir", "attack", "split", "sweep", "defense", "embedder", "scorer",
           "corrector", "generator", "seed", "workers"});
  r.read(j, "", "corpus", c.corpus);
  r.read(j, "", "output_dir", c.output_dir);
  r.read(j, "", "seed", c.seed);
  r.read(j, "", "workers", c.workers);

  if (const json* s = r.section(j, "attack", "attack")) {
    r.allow(*s, "attack", {"mask_count", "gamma", "top_k"});
    r.read(*s, "attack", "mask_count", c.attack.mask_count);
    r.read(*s, "attack", "gamma", c.attack.gamma);
    r.read(*s, "attack", "top_k", c.attack.top_k);
  }
  if (const json* s = r.section(j, "split", "split")) {
    r.allow(*s, "split",
            {"member_fraction", "seed", "train_count_per_class", "test_count_per_class"});
    r.read(*s, "split", "member_fraction", c.split.member_fraction);
    r.read(*s, "split", "seed", c.split.seed);
    r.read(*s, "split", "train_count_per_class", c.split.train_count_per_class);
    r.read(*s, "split", "test_count_per_class", c.split.test_count_per_class);
  }
  if (const json* s = r.section(j, "sweep", "sweep")) {
    r.allow(*s, "sweep", {"mask_counts", "gammas", "top_ks"});
    r.read_list(*s, "sweep", "mask_counts", c.sweep.mask_counts);
    r.read_list(*s, "sweep", "gammas", c.sweep.gammas);
    r.read_list(*s, "sweep", "top_ks", c.sweep.top_ks);
  }
  if (const json* s = r.section(j, "defense", "defense")) {
    r.allow(*s, "defense", {"prompt_modification", "rerank_shuffle_seed", "paraphrase"});
    r.read(*s, "defense", "prompt_modification", c.defense.prompt_modification);
    r.read(*s, "defense", "paraphrase", c.defense.paraphrase);
    if (s->contains("rerank_shuffle_seed") && !s->at("rerank_shuffle_seed").is_null()) {
      std::uint64_t seed = 0;
      r.read(*s, "defense", "rerank_shuffle_seed", seed);
      c.defense.rerank_shuffle_seed = seed;
    }
  }
  if (const json* s = r.section(j, "embedder", "embedder")) {
    r.allow(*s, "embedder", {"type", "dimension", "seed", "skip_stopwords"});
    std::string type = "hashed_bow";
    r.read(*s, "embedder", "type", type);
    if (type != "hashed_bow") problems.push_back("embedder.type must be \"hashed_bow\"");
    r.read(*s, "embedder", "dimension", c.embedder.dimension);
    r.read(*s, "embedder", "seed", c.embedder.seed);
    r.read(*s, "embedder", "skip_stopwords", c.embedder.skip_stopwords);
  }
  if (const json* s = r.section(j, "scorer", "scorer")) {
    r.allow(*s, "scorer",
            {"type", "training", "background_documents", "background_seed", "lambda"});
    std::string type = "bigram";
    r.read(*s, "scorer", "type", type);
    if (type != "bigram") problems.push_back("scorer.type must be \"bigram\"");
    r.read(*s, "scorer", "training", c.scorer.training);
    r.read(*s, "scorer", "background_documents", c.scorer.background_documents);
    r.read(*s, "scorer", "background_seed", c.scorer.background_seed);
    r.read(*s, "scorer", "lambda", c.scorer.lambda);
  }
  if (const json* s = r.section(j, "corrector", "corrector")) {
    r.allow(*s, "corrector", {"type"});
    r.read(*s, "corrector", "type", c.corrector.type);
  }
  if (const json* s = r.section(j, "generator", "generator")) {
    r.allow(*s, "generator",
            {"type", "threshold", "autocorrect", "merge_adjacent", "logprobs", "remote"});
    r.read(*s, "generator", "type", c.generator.type);
    r.read(*s, "generator", "threshold", c.generator.threshold);
    r.read(*s, "generator", "autocorrect", c.generator.autocorrect);
    r.read(*s, "generator", "merge_adjacent", c.generator.merge_adjacent);
    r.read(*s, "generator", "logprobs", c.generator.logprobs);
    if (s->contains("remote")) {
      try {
        c.generator.remote = RemoteConfig::from_json(s->at("remote"));
      } catch (const ConfigError& e) {
        std::istringstream lines(e.what());
        std::string line;
        std::getline(lines, line);  // header
        while (std::getline(lines, line)) {
          const auto start = line.find_first_not_of(' ');
          problems.push_back("generator.remote." +
                             line.substr(start == std::string::npos ? 0 : start));
        }
        if (problems.empty()) problems.push_back(std::string("generator.remote: ") + e.what());
      }
    }
  }
  // Fields that failed to parse kept their defaults, so these add no noise.
  for (auto& p : c.problems()) problems.push_back(std::move(p));
  if (!problems.empty()) fail(problems);
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return from_json(j);
}

void RunConfig::validate() const {
  if (const auto found = problems(); !found.empty()) fail(found);
}

std::vector<std::string> RunConfig::problems() const {
  std::vector<std::string> problems;
  if (attack.mask_count < 1) problems.push_back("attack.mask_count must be >= 1");
  if (!(attack.gamma >= 0.0 && attack.gamma <= 1.0)) {
    problems.push_back("attack.gamma must lie in [0, 1]");
  }
  if (attack.top_k < 1) problems.push_back("attack.top_k must be >= 1");
  if (!(split.member_fraction > 0.0 && split.member_fraction < 1.0)) {
    problems.push_back("split.member_fraction must lie in (0, 1)");
  }
  if (sweep.mask_counts.empty() || sweep.gammas.empty() || sweep.top_ks.empty()) {
    problems.push_back("sweep lists must be non-empty");
  }
  for (int m : sweep.mask_counts) {
    if (m < 1) problems.push_back("sweep.mask_counts entries must be >= 1");
  }
  for (double g : sweep.gammas) {
    if (!(g >= 0.0 && g <= 1.0)) problems.push_back("sweep.gammas entries must lie in [0, 1]");
  }
  for (std::size_t k : sweep.top_ks) {
    if (k < 1) problems.push_back("sweep.top_ks entries must be >= 1");
  }
  if (embedder.dimension < 1) problems.push_back("embedder.dimension must be >= 1");
  if (scorer.training.empty()) problems.push_back("scorer.training must be non-empty");
  if (scorer.training == "synthetic" && scorer.background_documents < 1) {
    problems.push_back("scorer.background_documents must be >= 1");
  }
  if (!(scorer.lambda >= 0.0 && scorer.lambda < 1.0)) {
    problems.push_back("scorer.lambda must lie in [0, 1)");
  }
  if (corrector.type != "dictionary" && corrector.type != "identity") {
    problems.push_back("corrector.type must be \"dictionary\" or \"identity\"");
  }
  if (generator.type == "oracle") {
    if (!(generator.threshold >= 0.0 && generator.threshold <= 1.0)) {
      problems.push_back("generator.threshold must lie in [0, 1]");
    }
  } else if (generator.type == "remote") {
    if (!generator.remote) problems.push_back("generator.remote is required for type \"remote\"");
  } else {
    problems.push_back("generator.type must be \"oracle\" or \"remote\"");
  }
  if (workers < 1) problems.push_back("workers must be >= 1");
  return problems;
}

json RunConfig::to_json() const {
  json j;
  j["corpus"] = corpus.string();
  j["attack"] = {
      {"mask_count", attack.mask_count}, {"gamma", attack.gamma}, {"top_k", attack.top_k}};
  j["split"] = {{"member_fraction", split.member_fraction},
                {"seed", split.seed},
                {"train_count_per_class", split.train_count_per_class},
                {"test_count_per_class", split.test_count_per_class}};
  j["sweep"] = {
      {"mask_counts", sweep.mask_counts}, {"gammas", sweep.gammas}, {"top_ks", sweep.top_ks}};
  j["defense"] = {
      {"prompt_modification", defense.prompt_modification},
      {"rerank_shuffle_seed",
       defense.rerank_shuffle_seed ? json(*defense.rerank_shuffle_seed) : json(nullptr)},
      {"paraphrase", defense.paraphrase}};
  j["embedder"] = {{"type", "hashed_bow"},
                   {"dimension", embedder.dimension},
                   {"seed", embedder.seed},
                   {"skip_stopwords", embedder.skip_stopwords}};
  j["scorer"] = {{"type", "bigram"},
                 {"training", scorer.training},
                 {"background_documents", scorer.background_documents},
                 {"background_seed", scorer.background_seed},
                 {"lambda", scorer.lambda}};
  j["corrector"] = {{"type", corrector.type}};
  j["generator"] = {{"type", generator.type},
                    {"threshold", generator.threshold},
                    {"autocorrect", generator.autocorrect},
                    {"merge_adjacent", generator.merge_adjacent},
                    {"logprobs", generator.logprobs}};
  if (generator.remote) j["generator"]["remote"] = generator.remote->to_json();
  j["seed"] = seed;
  j["workers"] = workers;
  return j;
}

Backends::Backends(const RunConfig& config) {
  config.validate();
  std::vector<std::string> texts;
  if (config.scorer.training == "synthetic") {
    SynthSpec spec;
    spec.documents = config.scorer.background_documents;
    spec.seed = config.scorer.background_seed;
    spec.id_prefix = "bg";
    for (const Document& d : synth_corpus(spec)) texts.push_back(d.text);
  } else {
    for (const Document& d : load_corpus(config.scorer.training)) texts.push_back(d.text);
  }
  scorer_ = std::make_unique<BigramScorer>(texts, config.scorer.lambda);
  embedder_ = std::make_unique<HashedBowEmbedder>(config.embedder.dimension, config.embedder.seed,
                                                  config.embedder.skip_stopwords);
  if (config.corrector.type == "identity") {
    owned_corrector_ = std::make_unique<IdentityCorrector>();
    corrector_ = owned_corrector_.get();
  } else {
    corrector_ = &DictionaryCorrector::bundled();
  }
  tokenizer_ = &GreedySubwordTokenizer::bundled();
  if (config.generator.type == "remote") {
    generator_ = std::make_unique<RemoteGenerator>(*config.generator.remote);
  } else {
    OracleConfig oc;
    oc.threshold = config.generator.threshold;
    oc.autocorrect = config.generator.autocorrect ? corrector_ : nullptr;
    oc.merge_adjacent = config.generator.merge_adjacent;
    oc.logprobs = config.generator.logprobs;
    generator_ = std::make_unique<OracleGenerator>(*scorer_, oc);
  }
}

Backends::~Backends() = default;

std::vector<LabeledDocument> evaluation_documents(const MemberSplit& split, const SplitSpec& spec) {
  std::vector<LabeledDocument> docs =
      spec.test_count_per_class == 0 ? label_all(split)
                                     : sample_eval_set(split.members, split.non_members, spec).test;
  sort_by_id(docs);
  return docs;
}

std::vector<LabeledDocument> training_documents(const MemberSplit& split, const SplitSpec& spec) {
  if (spec.train_count_per_class == 0) return {};
  std::vector<LabeledDocument> docs = sample_eval_set(split.members, split.non_members, spec).train;
  sort_by_id(docs);
  return docs;
}

json resource_fingerprints() {
  json j;
  for (const char* name : {"stopwords_en.txt", "vocab_en.txt", "lexicon_en.txt", "synonyms_en.tsv",
                           "synth_templates.json"}) {
    j[name] = hex64(file_fingerprint(data_file(name)));
  }
  j["stopword_list"] = hex64(StopwordList::bundled().fingerprint());
  return j;
}

}  // namespace maskmia
