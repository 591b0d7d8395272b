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

#ifndef MASKMIA_ATTACK_HPP_
#define MASKMIA_ATTACK_HPP_

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"
#include "maskmia/corpus.hpp"
#include "maskmia/masker.hpp"
#include "maskmia/rag.hpp"

namespace maskmia {

struct AttackConfig {
  int mask_count = 10;
  double gamma = 0.5;
  std::size_t top_k = 10;

  // Throws ConfigError listing every out-of-range field.
  void validate() const;
  friend bool operator==(const AttackConfig&, const AttackConfig&) = default;
};

enum class Verdict { kMember, kNonMember, kInconclusive };

std::string_view to_string(Verdict v);

struct SlotResult {
  std::optional<std::string> predicted;  // absent when the reply skipped the slot
  bool matched = false;
};

struct AttackOutcome {
  std::string source_id;
  int mask_count = 0;
  int correct_count = 0;
  double accuracy = 0.0;  // correct_count / mask_count; membership score
  Verdict verdict = Verdict::kInconclusive;
  bool retrieved_target = false;
  std::map<int, SlotResult> per_slot;
  std::string note;  // reason for an inconclusive outcome
};

// "[Mask_i]: answer" lines; label case-insensitive, answer trimmed at both
// ends only. Slots outside 1..M are dropped and the first line per slot
// wins. Never throws.
std::map<int, std::string> parse_response(std::string_view response, int mask_count);

// Case-folded, outer punctuation removed, inner whitespace runs collapsed.
std::string normalize_answer(std::string_view answer);

struct Grade {
  int correct_count = 0;
  std::map<int, SlotResult> per_slot;
};

Grade grade(const MaskedDocument& masked, const std::map<int, std::string>& predictions);

// Strictly more than gamma * M correct.
Verdict decide(int correct_count, int mask_count, double gamma);

// One RAG query with the masked document; no masking step.
AttackOutcome attack_masked(const MaskedDocument& masked, const AttackConfig& cfg,
                            const RagSystem& rag);

// Masks, queries once, grades. Unmaskable documents yield an inconclusive
// outcome rather than an error.
AttackOutcome infer_membership(const Document& doc, const AttackConfig& cfg, const RagSystem& rag,
                               const MaskStrategy& masker);

nlohmann::json to_json(const AttackOutcome& outcome);
AttackOutcome attack_outcome_from_json(const nlohmann::json& j);

}  // namespace maskmia

#endif  // MASKMIA_ATTACK_HPP_
