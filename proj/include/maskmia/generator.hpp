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

#ifndef MASKMIA_GENERATOR_HPP_
#define MASKMIA_GENERATOR_HPP_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "maskmia/error.hpp"
#include "maskmia/lm.hpp"

namespace maskmia {

struct ChatPrompt {
  std::string system;
  std::string user;
};

struct Generation {
  std::string text;
  // Present only when the backend returns per-token logprobs.
  std::optional<std::vector<TokenLogprob>> logprobs;
};

// The LLM behind the RAG system. Implementations may be black-box, in
// which case the logprob accessors report a CapabilityError.
class Generator {
 public:
  virtual ~Generator() = default;
  virtual Generation generate(const ChatPrompt& prompt) const = 0;
  virtual bool supports_logprobs() const { return false; }
  // Per-token logprobs of `text` itself.
  virtual std::vector<TokenLogprob> text_logprobs(std::string_view /*text*/) const {
    throw CapabilityError("generator does not expose token logprobs");
  }
  virtual bool concurrent_safe() const { return true; }
};

}  // namespace maskmia

#endif  // MASKMIA_GENERATOR_HPP_
