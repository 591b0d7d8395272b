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

#ifndef MASKMIA_EXPERIMENT_HPP_
#define MASKMIA_EXPERIMENT_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "maskmia/attack.hpp"
#include "maskmia/baselines.hpp"
#include "maskmia/corpus.hpp"
#include "maskmia/masker.hpp"
#include "maskmia/metrics.hpp"
#include "maskmia/rag.hpp"

namespace maskmia {

struct LabeledOutcome {
  AttackOutcome outcome;
  bool member = false;
};

struct MetricsReport {
  double retrieval_recall = 0.0;
  double roc_auc = 0.0;
  ConfusionMetrics confusion;
  std::size_t n_member = 0;
  std::size_t n_non_member = 0;
  std::size_t n_inconclusive = 0;
  std::size_t n_rejected = 0;  // LLM masking outputs refused by the validator
  double mean_member_accuracy = 0.0;
  double mean_non_member_accuracy = 0.0;
  int mask_count = 0;
  std::size_t top_k = 0;
  double gamma = 0.0;
  nlohmann::json config_echo = nlohmann::json::object();
};

nlohmann::json to_json(const MetricsReport& r);

// Inconclusive outcomes are counted but excluded from every metric.
// Verdicts are recomputed from correct counts with `gamma`.
MetricsReport evaluate(std::span<const LabeledOutcome> outcomes, double gamma);

// Runs the attack on every document; output is in input order.
std::vector<LabeledOutcome> run_attack(std::span<const LabeledDocument> docs,
                                       const AttackConfig& cfg, const RagSystem& rag,
                                       const MaskStrategy& masker, std::size_t workers = 1);

struct SweepSpec {
  std::vector<int> mask_counts{5, 10, 15, 20};
  std::vector<double> gammas = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  std::vector<std::size_t> top_ks{5, 10, 15, 20};

  void validate() const;
};

// lo, lo+step, ..., hi (inclusive within half a step), each rounded to
// nine decimals. "0.1:1.0:0.1" gives ten values.
std::vector<double> value_range(double lo, double hi, double step);
std::vector<double> parse_range(std::string_view spec);

struct SweepRow {
  int mask_count = 0;
  std::size_t top_k = 0;
  double gamma = 0.0;
  std::optional<MetricsReport> report;
  std::string error;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  int best_mask_count = 0;  // highest AUC
  double best_gamma = 0.0;  // highest F1 at the best M
  std::size_t reference_top_k = 0;
};

// Masks once per M, queries once per (M, K), and re-thresholds per gamma.
// A failing grid point is recorded and the sweep continues.
SweepResult sweep(const SweepSpec& spec, std::span<const LabeledDocument> docs,
                  const RagSystem& rag, const MaskStrategy& masker, std::size_t reference_top_k,
                  std::size_t workers = 1);

void write_sweep_csv(const SweepResult& result, const std::filesystem::path& path);
// sweep_M.dat, sweep_gamma.dat, sweep_K.dat: "x y" series for plotting.
void write_plot_series(const SweepResult& result, const std::filesystem::path& dir);

enum class AblationStrategy { kRandom, kLlmBased, kPlmOnly, kNoSpellCorrection, kFull };

std::string_view to_string(AblationStrategy s);
AblationStrategy parse_ablation_strategy(std::string_view name);

// llm_based requires `llm`. The random strategy draws from `seed`.
std::unique_ptr<MaskStrategy> make_strategy(AblationStrategy s, const MaskerParts& parts,
                                            std::uint64_t seed, const Generator* llm = nullptr);

MetricsReport ablation(AblationStrategy s, std::span<const LabeledDocument> docs,
                       const AttackConfig& cfg, const RagSystem& rag, const MaskerParts& parts,
                       std::uint64_t seed, const Generator* llm = nullptr, std::size_t workers = 1);

struct BaselineRun {
  std::vector<BaselineScore> scores;  // test documents, input order
  double roc_auc = 0.0;
  nlohmann::json details = nlohmann::json::object();
};

// min-k sweeps k = 1..20 and keeps the best test AUC. s2mia-sp fits its
// classifier on `train`.
BaselineRun run_baseline(BaselineMethod method, std::span<const LabeledDocument> test,
                         std::span<const LabeledDocument> train, const RagSystem& rag,
                         std::size_t k, const Embedder& embedder, std::size_t workers = 1);

}  // namespace maskmia

#endif  // MASKMIA_EXPERIMENT_HPP_
