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

#ifndef MASKMIA_VECTOR_INDEX_HPP_
#define MASKMIA_VECTOR_INDEX_HPP_

#include <Eigen/Dense>
#include <algorithm>
#include <cstddef>
#include <numeric>
#include <string>
#include <unordered_set>
#include <vector>

#include "maskmia/corpus.hpp"
#include "maskmia/embedding.hpp"
#include "maskmia/error.hpp"

namespace maskmia {

template <typename Scalar>
struct BasicHit {
  std::size_t position = 0;  // insertion order in the index
  Scalar score{};
};

// Exact inner-product index. Columns are entries in insertion order; ids
// are unique. Immutable once shared, so searches may run concurrently.
template <typename Scalar>
class BasicVectorIndex {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  explicit BasicVectorIndex(Eigen::Index dimension) : vectors_(dimension, 0) {
    if (dimension < 1) throw InvalidArgument("index dimension must be >= 1");
  }

  BasicVectorIndex(std::vector<std::string> ids, Matrix vectors)
      : ids_(std::move(ids)), vectors_(std::move(vectors)) {
    if (static_cast<Eigen::Index>(ids_.size()) != vectors_.cols()) {
      throw InvalidArgument("index: " + std::to_string(ids_.size()) + " ids for " +
                            std::to_string(vectors_.cols()) + " vectors");
    }
    std::unordered_set<std::string> seen;
    for (const auto& id : ids_) {
      if (!seen.insert(id).second) throw InvalidArgument("index: duplicate id '" + id + "'");
    }
  }

  Eigen::Index dimension() const { return vectors_.rows(); }
  std::size_t size() const { return ids_.size(); }
  const std::string& id_at(std::size_t position) const { return ids_.at(position); }
  const std::vector<std::string>& ids() const { return ids_; }
  const Matrix& vectors() const { return vectors_; }

  // Top-k by inner product; equal scores keep insertion order.
  std::vector<BasicHit<Scalar>> search(const Vector& query, std::size_t k) const {
    if (k < 1) throw InvalidArgument("K must be >= 1");
    if (query.size() != dimension()) {
      throw InvalidArgument("query dimension " + std::to_string(query.size()) +
                            " != index dimension " + std::to_string(dimension()));
    }
    const Vector scores = vectors_.transpose() * query;
    std::vector<std::size_t> order(ids_.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const std::size_t take = std::min(k, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                      [&](std::size_t a, std::size_t b) {
                        const auto sa = scores[static_cast<Eigen::Index>(a)];
                        const auto sb = scores[static_cast<Eigen::Index>(b)];
                        return sa != sb ? sa > sb : a < b;
                      });
    std::vector<BasicHit<Scalar>> hits;
    hits.reserve(take);
    for (std::size_t i = 0; i < take; ++i) {
      hits.push_back({order[i], scores[static_cast<Eigen::Index>(order[i])]});
    }
    return hits;
  }

 private:
  std::vector<std::string> ids_;
  Matrix vectors_;
};

using VectorIndex = BasicVectorIndex<float>;

struct RetrievalHit {
  Document document;
  float score = 0.0f;
};

struct RetrievalResult {
  std::vector<RetrievalHit> hits;  // scores non-increasing

  bool contains(std::string_view id) const {
    return std::any_of(hits.begin(), hits.end(),
                       [&](const RetrievalHit& h) { return h.document.id == id; });
  }
};

VectorIndex build_index(const Corpus& corpus, const Embedder& embedder);

RetrievalResult retrieve(const VectorIndex& index, const Corpus& corpus, std::string_view query,
                         std::size_t k, const Embedder& embedder);

}  // namespace maskmia

#endif  // MASKMIA_VECTOR_INDEX_HPP_
