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

#include "maskmia/vector_index.hpp"

namespace maskmia {

VectorIndex build_index(const Corpus& corpus, const Embedder& embedder) {
  if (corpus.empty()) throw InvalidArgument("cannot index an empty corpus");
  const Eigen::Index dim = embedder.dimension();
  VectorIndex::Matrix vectors(dim, static_cast<Eigen::Index>(corpus.size()));
  std::vector<std::string> ids;
  ids.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    Eigen::VectorXf v = embedder.embed(corpus[i].text);
    if (v.size() != dim) {
      throw InvalidArgument("embedder returned dimension " + std::to_string(v.size()) + " for '" +
                            corpus[i].id + "', expected " + std::to_string(dim));
    }
    vectors.col(static_cast<Eigen::Index>(i)) = v;
    ids.push_back(corpus[i].id);
  }
  return VectorIndex(std::move(ids), std::move(vectors));
}

RetrievalResult retrieve(const VectorIndex& index, const Corpus& corpus, std::string_view query,
                         std::size_t k, const Embedder& embedder) {
  if (index.size() != corpus.size()) {
    throw InvalidArgument("index and corpus sizes differ");
  }
  RetrievalResult out;
  for (const auto& hit : index.search(embedder.embed(query), k)) {
    out.hits.push_back({corpus[hit.position], hit.score});
  }
  return out;
}

}  // namespace maskmia
