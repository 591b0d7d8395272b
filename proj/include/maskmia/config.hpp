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

#ifndef MASKMIA_CONFIG_HPP_
#define MASKMIA_CONFIG_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "json.hpp"
#include "maskmia/attack.hpp"
#include "maskmia/corpus.hpp"
#include "maskmia/embedding.hpp"
#include "maskmia/experiment.hpp"
#include "maskmia/lm.hpp"
#include "maskmia/masker.hpp"
#include "maskmia/rag.hpp"
#include "maskmia/remote_generator.hpp"
#include "maskmia/textprep.hpp"

namespace maskmia {

struct EmbedderSettings {
  std::size_t dimension = 256;
  std::uint64_t seed = HashedBowEmbedder::kDefaultSeed;
  bool skip_stopwords = true;
};

// The proxy scorer is trained on text disjoint from the attacked corpus:
// either a synthetic background corpus or a JSONL file.
struct ScorerSettings {
  std::string training = "synthetic";  // "synthetic" or a JSONL path
  std::size_t background_documents = 1000;
  std::uint64_t background_seed = 1234;
  double lambda = 0.7;
};

struct CorrectorSettings {
  std::string type = "dictionary";  // "dictionary" | "identity"
};

struct GeneratorSettings {
  std::string type = "oracle";  // "oracle" | "remote"
  double threshold = 0.5;
  bool autocorrect = true;
  bool merge_adjacent = true;
  bool logprobs = true;
  std::optional<RemoteConfig> remote;  // required when type == "remote"
};

struct RunConfig {
  std::filesystem::path corpus;
  std::filesystem::path output_dir = "run";
  AttackConfig attack;
  SplitSpec split{0.8, 3, 0, 0};
  SweepSpec sweep;
  DefenseConfig defense;
  EmbedderSettings embedder;
  ScorerSettings scorer;
  CorrectorSettings corrector;
  GeneratorSettings generator;
  std::uint64_t seed = 7;  // random masking
  std::size_t workers = 1;

  // Missing keys keep their defaults; unknown keys and ill-typed values are
  // errors. Throws ConfigError listing every violated field.
  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig load(const std::filesystem::path& path);
  // Omits output_dir, so a run re-executed from its echo is byte-identical
  // wherever it is written.
  nlohmann::json to_json() const;
  // Semantic checks; throws ConfigError listing every violated field.
  void validate() const;
  // The messages validate() would report; empty when valid.
  std::vector<std::string> problems() const;
};

// Owns the backends a run needs, built once from a RunConfig.
class Backends {
 public:
  explicit Backends(const RunConfig& config);
  ~Backends();
  Backends(const Backends&) = delete;
  Backends& operator=(const Backends&) = delete;

  const LmScorer& scorer() const { return *scorer_; }
  const Embedder& embedder() const { return *embedder_; }
  const SpellCorrector& corrector() const { return *corrector_; }
  const TokenizerAdapter& tokenizer() const { return *tokenizer_; }
  const Generator& generator() const { return *generator_; }
  MaskerParts parts() const { return {*scorer_, *tokenizer_, *corrector_}; }

 private:
  std::unique_ptr<LmScorer> scorer_;
  std::unique_ptr<Embedder> embedder_;
  std::unique_ptr<SpellCorrector> owned_corrector_;
  const SpellCorrector* corrector_ = nullptr;
  const TokenizerAdapter* tokenizer_ = nullptr;
  std::unique_ptr<Generator> generator_;
};

// Members and non-members of the split, or a balanced sample of them when
// test_count_per_class > 0. Ordered by document id.
std::vector<LabeledDocument> evaluation_documents(const MemberSplit& split, const SplitSpec& spec);
// Train side of the balanced sample; empty when train_count_per_class == 0.
std::vector<LabeledDocument> training_documents(const MemberSplit& split, const SplitSpec& spec);

// Fingerprints of bundled resources, echoed into reports.
nlohmann::json resource_fingerprints();

}  // namespace maskmia

#endif  // MASKMIA_CONFIG_HPP_
