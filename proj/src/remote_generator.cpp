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

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "maskmia/remote_generator.hpp"

#include <cstdlib>
#include <semaphore>
#include <thread>
#include <vector>

#include "httplib.h"
#include "maskmia/error.hpp"

namespace maskmia {
namespace {

constexpr std::ptrdiff_t kMaxInFlightLimit = 1024;

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;    // prefix before /chat/completions, no trailing '/'
};

Endpoint split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("base_url lacks a scheme: " + url);
  const std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https")
    throw ConfigError("base_url scheme must be http or https");
  const auto path_at = url.find('/', scheme_end + 3);
  Endpoint e;
  e.origin = url.substr(0, path_at);
  e.path = path_at == std::string::npos ? "" : url.substr(path_at);
  while (!e.path.empty() && e.path.back() == '/') e.path.pop_back();
  return e;
}

bool retryable(int status) { return status == 429 || status >= 500; }

}  // namespace

RemoteConfig RemoteConfig::from_json(const nlohmann::json& j) {
  std::vector<std::string> bad;
  RemoteConfig c;
  if (!j.is_object()) throw ConfigError("remote generator config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "base_url" || key == "model" || key == "api_key_env") {
      if (!value.is_string()) bad.push_back(key + " must be a string");
    } else if (key == "logprobs") {
      if (!value.is_boolean()) bad.push_back("logprobs must be a boolean");
    } else if (key == "max_in_flight") {
      if (!value.is_number_integer()) bad.push_back("max_in_flight must be an integer");
    } else if (key == "api_key") {
      bad.push_back(
          "api_key must not appear in config; name an environment variable in api_key_env");
    } else {
      bad.push_back("unknown key " + key);
    }
  }
  if (bad.empty()) {
    c.base_url = j.value("base_url", "");
    c.model = j.value("model", "");
    c.api_key_env = j.value("api_key_env", "");
    c.logprobs = j.value("logprobs", false);
    c.max_in_flight = j.value("max_in_flight", 4);
  }
  if (c.base_url.empty()) bad.push_back("base_url is required");
  if (c.model.empty()) bad.push_back("model is required");
  if (c.max_in_flight < 1 || c.max_in_flight > kMaxInFlightLimit) {
    bad.push_back("max_in_flight must lie in [1, 1024]");
  }
  if (!bad.empty()) {
    std::string msg = "invalid remote generator config:";
    for (const auto& b : bad) msg += "\n  " + b;
    throw ConfigError(msg);
  }
  return c;
}

nlohmann::json RemoteConfig::to_json() const {
  return {{"base_url", base_url},
          {"model", model},
          {"api_key_env", api_key_env},
          {"logprobs", logprobs},
          {"max_in_flight", max_in_flight}};
}

struct RemoteGenerator::Impl {
  Endpoint endpoint;
  std::counting_semaphore<kMaxInFlightLimit> slots;
  explicit Impl(Endpoint e, int in_flight) : endpoint(std::move(e)), slots(in_flight) {}
};

RemoteGenerator::RemoteGenerator(RemoteConfig config) : config_(std::move(config)) {
  if (!config_.api_key_env.empty()) {
    const char* key = std::getenv(config_.api_key_env.c_str());
    if (key == nullptr || *key == '\0') {
      throw ConfigError("environment variable " + config_.api_key_env +
                        " (api_key_env) is not set");
    }
    api_key_ = key;
  }
  if (config_.max_in_flight < 1 || config_.max_in_flight > kMaxInFlightLimit) {
    throw ConfigError("max_in_flight must lie in [1, 1024]");
  }
  impl_ = std::make_unique<Impl>(split_url(config_.base_url), config_.max_in_flight);
}

RemoteGenerator::~RemoteGenerator() = default;

nlohmann::json RemoteGenerator::request_body(const ChatPrompt& prompt) const {
  nlohmann::json messages = nlohmann::json::array();
  if (!prompt.system.empty()) messages.push_back({{"role", "system"}, {"content", prompt.system}});
  messages.push_back({{"role", "user"}, {"content", prompt.user}});
  nlohmann::json body = {{"model", config_.model}, {"messages", messages}, {"temperature", 0}};
  if (config_.logprobs) body["logprobs"] = true;
  return body;
}

Generation RemoteGenerator::parse_reply(const nlohmann::json& reply, bool want_logprobs) {
  try {
    const auto& choice = reply.at("choices").at(0);
    Generation g;
    const auto& content = choice.at("message").at("content");
    g.text = content.is_null() ? "" : content.get<std::string>();
    if (want_logprobs) {
      std::vector<TokenLogprob> lp;
      if (choice.contains("logprobs") && !choice["logprobs"].is_null()) {
        for (const auto& t : choice["logprobs"].at("content")) {
          lp.push_back({t.at("token").get<std::string>(), t.at("logprob").get<double>()});
        }
      }
      g.logprobs = std::move(lp);
    }
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw BackendError(std::string("malformed chat-completion reply: ") + e.what());
  }
}

Generation RemoteGenerator::generate(const ChatPrompt& prompt) const {
  const std::string body = request_body(prompt).dump();
  const std::string path = impl_->endpoint.path + "/chat/completions";
  impl_->slots.acquire();
  struct Release {
    std::counting_semaphore<kMaxInFlightLimit>& s;
    ~Release() { s.release(); }
  } release{impl_->slots};

  httplib::Client client(impl_->endpoint.origin);
  client.set_connection_timeout(config_.timeout);
  client.set_read_timeout(config_.timeout);
  client.set_write_timeout(config_.timeout);
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

  auto backoff = config_.initial_backoff;
  std::string last_error;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
    auto res = client.Post(path, headers, body, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 200) {
      try {
        return parse_reply(nlohmann::json::parse(res->body), config_.logprobs);
      } catch (const nlohmann::json::exception& e) {
        throw BackendError(std::string("reply is not JSON: ") + e.what());
      }
    }
    last_error = "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200);
    if (!retryable(res->status)) throw BackendError(last_error);
  }
  throw BackendError("giving up after " + std::to_string(config_.max_retries + 1) +
                     " attempts; last " + last_error);
}

}  // namespace maskmia
