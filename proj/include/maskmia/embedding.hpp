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

#ifndef MASKMIA_EMBEDDING_HPP_
#define MASKMIA_EMBEDDING_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <string_view>

#include "maskmia/textprep.hpp"

namespace maskmia {

class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual Eigen::VectorXf embed(std::string_view text) const = 0;
  virtual Eigen::Index dimension() const = 0;
};

// Term-frequency vector over hashed lower-case words, L2-normalised, so the
// inner product of two embeddings is their cosine. Text without counted
// words embeds to the zero vector.
class HashedBowEmbedder : public Embedder {
 public:
  static constexpr Eigen::Index kDefaultDimension = 256;
  static constexpr std::uint64_t kDefaultSeed = 0x5eed'ba65'0f'11ULL;

  explicit HashedBowEmbedder(Eigen::Index dimension = kDefaultDimension,
                             std::uint64_t seed = kDefaultSeed, bool skip_stopwords = true,
                             const StopwordList& stopwords = StopwordList::bundled());

  Eigen::VectorXf embed(std::string_view text) const override;
  Eigen::Index dimension() const override { return dimension_; }
  Eigen::Index bucket_of(std::string_view lower_word) const;

 private:
  Eigen::Index dimension_;
  std::uint64_t seed_;
  bool skip_stopwords_;
  const StopwordList* stopwords_;
};

template <typename Scalar>
Scalar cosine(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& a,
              const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& b) {
  const Scalar na = a.norm();
  const Scalar nb = b.norm();
  if (na == Scalar(0) || nb == Scalar(0)) return Scalar(0);
  return a.dot(b) / (na * nb);
}

}  // namespace maskmia

#endif  // MASKMIA_EMBEDDING_HPP_
