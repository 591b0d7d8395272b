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

#ifndef MASKMIA_BASELINES_HPP_
#define MASKMIA_BASELINES_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "maskmia/corpus.hpp"
#include "maskmia/embedding.hpp"
#include "maskmia/generator.hpp"
#include "maskmia/rag.hpp"

namespace maskmia {

enum class BaselineMethod { kRagMia, kS2miaS, kS2miaSp, kMinK };

std::string_view to_string(BaselineMethod m);
// Accepts "rag-mia" / "rag_mia" style spellings. Throws InvalidArgument.
BaselineMethod parse_baseline_method(std::string_view name);

// logit in [0, 1]; higher means more likely a member for every method.
struct BaselineScore {
  std::string source_id;
  BaselineMethod method = BaselineMethod::kRagMia;
  double logit = 0.0;
  nlohmann::json raw;
};

nlohmann::json to_json(const BaselineScore& s);

// First alphabetic token equals "yes", ignoring case.
bool is_affirmative(std::string_view response);

BaselineScore rag_mia(const Document& doc, const RagSystem& rag, std::size_t k);

struct HalfSplit {
  std::string first;
  std::string second;
};
// Whitespace-delimited words; the first half gets floor(n / 2). Throws
// InvalidArgument for fewer than two words.
HalfSplit split_halves(std::string_view text);

// exp(-mean logprob). Throws InvalidArgument when empty.
double perplexity(std::span<const TokenLogprob> logprobs);

struct S2miaObservation {
  std::string source_id;
  double similarity = 0.0;  // cosine(response, second half)
  std::optional<double> perplexity;
};

// One query with the first half of the document. With `need_perplexity`
// the generator must return logprobs, otherwise CapabilityError.
S2miaObservation s2mia_observe(const Document& doc, const RagSystem& rag, std::size_t k,
                               const Embedder& embedder, bool need_perplexity);

BaselineScore s2mia_s_score(const S2miaObservation& obs);

// Member iff similarity >= t_sim and perplexity <= t_ppl; thresholds are
// grid-searched over train quantiles for the best F1.
class ThresholdClassifier {
 public:
  ThresholdClassifier(double sim_threshold, double ppl_threshold, double sim_range,
                      double ppl_range);
  static ThresholdClassifier fit(std::span<const S2miaObservation> train,
                                 std::span<const bool> labels, std::size_t grid = 50);

  bool predict(const S2miaObservation& obs) const;
  // 0.5 on the decision boundary, above it inside the member region.
  double score(const S2miaObservation& obs) const;
  double sim_threshold() const { return sim_threshold_; }
  double ppl_threshold() const { return ppl_threshold_; }
  double train_f1() const { return train_f1_; }

 private:
  double sim_threshold_;
  double ppl_threshold_;
  double sim_range_;
  double ppl_range_;
  double train_f1_ = 0.0;
};

BaselineScore s2mia_sp_score(const S2miaObservation& obs, const ThresholdClassifier& clf);

// Mean of the lowest ceil(k_percent / 100 * n) values (at least one).
double min_k_raw(std::span<const double> logprobs, double k_percent);

// Raw min-k scores for a batch, logits min-max rescaled over the batch
// (0.5 for all when the raw scores are equal). Needs logprob support.
std::vector<BaselineScore> min_k_prob(std::span<const Document> docs, const Generator& generator,
                                      double k_percent);
std::vector<BaselineScore> min_k_from_logprobs(std::span<const Document> docs,
                                               std::span<const std::vector<double>> logprobs,
                                               double k_percent);

}  // namespace maskmia

#endif  // MASKMIA_BASELINES_HPP_
