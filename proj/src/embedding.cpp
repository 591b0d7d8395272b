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

#include "maskmia/embedding.hpp"

#include "maskmia/error.hpp"
#include "maskmia/random.hpp"

namespace maskmia {

HashedBowEmbedder::HashedBowEmbedder(Eigen::Index dimension, std::uint64_t seed,
                                     bool skip_stopwords, const StopwordList& stopwords)
    : dimension_(dimension), seed_(seed), skip_stopwords_(skip_stopwords), stopwords_(&stopwords) {
  if (dimension < 1) throw InvalidArgument("embedding dimension must be >= 1");
}

Eigen::Index HashedBowEmbedder::bucket_of(std::string_view lower_word) const {
  return static_cast<Eigen::Index>(mix_seed(seed_, lower_word) %
                                   static_cast<std::uint64_t>(dimension_));
}

Eigen::VectorXf HashedBowEmbedder::embed(std::string_view text) const {
  Eigen::VectorXf v = Eigen::VectorXf::Zero(dimension_);
  if (is_blank(text)) return v;
  const WordSequence seq = segment(text, *stopwords_);
  for (const Word& w : seq.words()) {
    if (w.is_punctuation || (skip_stopwords_ && w.is_stopword)) continue;
    v[bucket_of(to_lower(w.surface))] += 1.0f;
  }
  const float n = v.norm();
  if (n > 0.0f) v /= n;
  return v;
}

}  // namespace maskmia
