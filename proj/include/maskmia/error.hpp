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

#ifndef MASKMIA_ERROR_HPP_
#define MASKMIA_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace maskmia {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller-supplied argument violates a documented precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Malformed input file or unparseable text structure.
class ParseError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// A backend does not support the requested feature (e.g. token logprobs).
class CapabilityError : public Error {
 public:
  using Error::Error;
};

// Configuration validation failure; message lists every violated field.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A subtext of the document has no word that may be masked.
class InsufficientMaskableWords : public Error {
 public:
  InsufficientMaskableWords(int subtext, int mask_count)
      : Error("subtext " + std::to_string(subtext) + " of " + std::to_string(mask_count) +
              " has no maskable word"),
        subtext_(subtext) {}
  int subtext() const { return subtext_; }

 private:
  int subtext_;
};

// An LLM-produced masking was rejected by the validator.
class MaskRejected : public Error {
 public:
  using Error::Error;
};

// Remote backend failure (HTTP, protocol).
class BackendError : public Error {
 public:
  using Error::Error;
};

}  // namespace maskmia

#endif  // MASKMIA_ERROR_HPP_
