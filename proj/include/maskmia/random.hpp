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

#ifndef MASKMIA_RANDOM_HPP_
#define MASKMIA_RANDOM_HPP_

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace maskmia {

// Deterministic sampling helpers. The standard distributions are
// implementation-defined, so everything that must reproduce across
// toolchains goes through these instead.
using Rng = std::mt19937_64;

// FNV-1a, 64-bit.
inline std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::string_view salt) {
  return fnv1a(salt, seed ^ 0x9e3779b97f4a7c15ULL);
}

// Uniform integer in [0, n), rejection-sampled. n must be > 0.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = Rng::max() - (Rng::max() % n + 1) % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x > limit);
  return x % n;
}

// Uniform double in [0, 1).
inline double uniform_unit(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline bool bernoulli(Rng& rng, double p) { return uniform_unit(rng) < p; }

template <typename T>
void shuffle(std::vector<T>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = uniform_index(rng, i);
    std::swap(items[i - 1], items[j]);
  }
}

template <typename T>
const T& pick(const std::vector<T>& items, Rng& rng) {
  return items[uniform_index(rng, items.size())];
}

}  // namespace maskmia

#endif  // MASKMIA_RANDOM_HPP_
