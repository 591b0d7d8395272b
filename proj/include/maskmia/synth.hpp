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

#ifndef MASKMIA_SYNTH_HPP_
#define MASKMIA_SYNTH_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "maskmia/corpus.hpp"
#include "maskmia/random.hpp"
#include "maskmia/textprep.hpp"

namespace maskmia {

// Patient/doctor consultation corpus generated from topic templates.
// Every document carries its own invented drug and doctor names; a
// fraction of documents are follow-ups that reuse an earlier document's
// names and topic.
struct SynthSpec {
  std::size_t documents = 200;
  std::uint64_t seed = 7;
  double follow_up_rate = 0.1;
  std::string id_prefix = "doc";
};

Corpus synth_corpus(const SynthSpec& spec);
Corpus synth_corpus(const SynthSpec& spec, const std::filesystem::path& templates);

// One typo (transposition, deletion, doubling or substitution) applied to
// a word; the result differs from the input.
std::string misspell(std::string_view word, Rng& rng);

// Each alphabetic word of at least `min_length` letters is misspelled with
// probability `rate`.
Corpus inject_misspellings(const Corpus& corpus, double rate, std::uint64_t seed,
                           std::size_t min_length = 5);

// Random texts of [min_words, max_words] segmented words drawn from the two
// pools. Any two consecutive words include a content word.
Corpus random_word_documents(std::size_t count, std::size_t min_words, std::size_t max_words,
                             std::uint64_t seed, std::span<const std::string> content_words,
                             std::span<const std::string> function_words);

}  // namespace maskmia

#endif  // MASKMIA_SYNTH_HPP_
