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

#include "maskmia/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "maskmia/error.hpp"

namespace maskmia {

double roc_auc(std::span<const ScoredLabel> scores) {
  std::vector<ScoredLabel> sorted(scores.begin(), scores.end());
  for (const auto& s : sorted) {
    if (std::isnan(s.score)) throw InvalidArgument("roc_auc: NaN score");
  }
  std::sort(sorted.begin(), sorted.end(),
            [](const ScoredLabel& a, const ScoredLabel& b) { return a.score < b.score; });
  // Twice the member rank sum, tie groups sharing their mean rank, keeps
  // everything in integers: a group over 0-based [a, b) has 2*mean = a+b+1.
  std::uint64_t n_pos = 0, twice_rank_sum = 0;
  for (std::size_t a = 0; a < sorted.size();) {
    std::size_t b = a;
    std::uint64_t pos_in_group = 0;
    while (b < sorted.size() && sorted[b].score == sorted[a].score) {
      pos_in_group += sorted[b].member ? 1 : 0;
      ++b;
    }
    twice_rank_sum += pos_in_group * (a + b + 1);
    n_pos += pos_in_group;
    a = b;
  }
  const std::uint64_t n_neg = sorted.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) throw InvalidArgument("roc_auc needs both members and non-members");
  const std::uint64_t twice_u = twice_rank_sum - n_pos * (n_pos + 1);
  return static_cast<double>(twice_u) / static_cast<double>(2 * n_pos * n_neg);
}

ConfusionMetrics confusion_metrics(std::span<const Prediction> predictions) {
  ConfusionMetrics m;
  for (const auto& p : predictions) {
    if (p.predicted_member) {
      (p.member ? m.tp : m.fp)++;
    } else {
      (p.member ? m.fn : m.tn)++;
    }
  }
  const std::size_t total = predictions.size();
  m.accuracy = total ? static_cast<double>(m.tp + m.tn) / static_cast<double>(total) : 0.0;
  m.precision_undefined = m.tp + m.fp == 0;
  m.recall_undefined = m.tp + m.fn == 0;
  m.precision =
      m.precision_undefined ? 0.0 : static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp);
  m.recall =
      m.recall_undefined ? 0.0 : static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn);
  m.f1 = m.precision > 0.0 && m.recall > 0.0
             ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;
  return m;
}

double retrieval_recall(std::span<const RetrievalFlag> flags) {
  std::size_t members = 0, hits = 0;
  for (const auto& f : flags) {
    if (!f.member) continue;
    ++members;
    hits += f.retrieved ? 1 : 0;
  }
  if (members == 0) throw InvalidArgument("retrieval recall needs at least one member");
  return static_cast<double>(hits) / static_cast<double>(members);
}

nlohmann::json to_json(const ConfusionMetrics& m) {
  return {{"tp", m.tp},
          {"fp", m.fp},
          {"tn", m.tn},
          {"fn", m.fn},
          {"accuracy", m.accuracy},
          {"precision", m.precision},
          {"recall", m.recall},
          {"f1", m.f1},
          {"precision_undefined", m.precision_undefined},
          {"recall_undefined", m.recall_undefined}};
}

}  // namespace maskmia
