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

#ifndef MASKMIA_METRICS_HPP_
#define MASKMIA_METRICS_HPP_

#include <cstddef>
#include <cstdint>
#include <span>

#include "json.hpp"

namespace maskmia {

struct ScoredLabel {
  double score = 0.0;
  bool member = false;
};

// Probability that a random member outscores a random non-member, ties
// counting one half. Throws InvalidArgument unless both classes occur.
double roc_auc(std::span<const ScoredLabel> scores);

struct Prediction {
  bool predicted_member = false;
  bool member = false;
};

struct ConfusionMetrics {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  // Set when the named ratio had a zero denominator and was reported as 0.
  bool precision_undefined = false;
  bool recall_undefined = false;
};

// Member is the positive class.
ConfusionMetrics confusion_metrics(std::span<const Prediction> predictions);

struct RetrievalFlag {
  bool retrieved = false;
  bool member = false;
};

// Mean retrieval over member entries only. Throws without members.
double retrieval_recall(std::span<const RetrievalFlag> flags);

nlohmann::json to_json(const ConfusionMetrics& m);

}  // namespace maskmia

#endif  // MASKMIA_METRICS_HPP_
