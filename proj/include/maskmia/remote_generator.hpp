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

#ifndef MASKMIA_REMOTE_GENERATOR_HPP_
#define MASKMIA_REMOTE_GENERATOR_HPP_

#include <chrono>
#include <memory>
#include <string>

#include "json.hpp"
#include "maskmia/generator.hpp"

namespace maskmia {

struct RemoteConfig {
  std::string base_url;  // e.g. https://api.example.com/v1
  std::string model;
  std::string api_key_env;  // name of the variable holding the bearer token
  bool logprobs = false;
  int max_in_flight = 4;
  int max_retries = 4;
  std::chrono::milliseconds initial_backoff{500};
  std::chrono::seconds timeout{60};

  // {"base_url","model","api_key_env","logprobs","max_in_flight"}; unknown
  // keys are rejected. Throws ConfigError listing every problem.
  static RemoteConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

// Chat-completion client. The bearer token is read once from the
// environment variable named in the config; a missing variable is a
// ConfigError. Requests beyond max_in_flight wait; 429 and 5xx replies
// and transport failures are retried with doubling backoff.
class RemoteGenerator : public Generator {
 public:
  explicit RemoteGenerator(RemoteConfig config);
  ~RemoteGenerator() override;
  RemoteGenerator(const RemoteGenerator&) = delete;
  RemoteGenerator& operator=(const RemoteGenerator&) = delete;

  Generation generate(const ChatPrompt& prompt) const override;
  bool supports_logprobs() const override { return config_.logprobs; }
  const RemoteConfig& config() const { return config_; }

  // Request body for a prompt; exposed for inspection.
  nlohmann::json request_body(const ChatPrompt& prompt) const;
  // Parses a chat-completion reply. Throws BackendError.
  static Generation parse_reply(const nlohmann::json& reply, bool want_logprobs);

 private:
  struct Impl;
  RemoteConfig config_;
  std::string api_key_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace maskmia

#endif  // MASKMIA_REMOTE_GENERATOR_HPP_
