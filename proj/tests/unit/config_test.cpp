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

#include "maskmia/config.hpp"

#include <gtest/gtest.h>

#include "maskmia/error.hpp"

namespace maskmia {
namespace {

std::string problems(const nlohmann::json& j) {
  try {
    RunConfig::from_json(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

TEST(RunConfig, DefaultsRoundTripThroughJson) {
  RunConfig c;
  c.corpus = "c.jsonl";
  const nlohmann::json j = c.to_json();
  EXPECT_FALSE(j.contains("output_dir"));
  EXPECT_EQ(RunConfig::from_json(j).to_json(), j);
}

TEST(RunConfig, OverridesApply) {
  const RunConfig c = RunConfig::from_json(
      {{"corpus", "x.jsonl"}, {"attack", {{"mask_count", 15}, {"gamma", 0.3}}}, {"workers", 3}});
  EXPECT_EQ(c.attack.mask_count, 15);
  EXPECT_EQ(c.attack.gamma, 0.3);
  EXPECT_EQ(c.attack.top_k, 10u);
  EXPECT_EQ(c.workers, 3u);
}

TEST(RunConfig, ListsEveryProblem) {
  const std::string msg = problems({{"corpus", 4},
                                    {"bogus", true},
                                    {"attack", {{"mask_count", 0}, {"gamma", 1.5}}},
                                    {"generator", {{"type", "telepathy"}}}});
  for (const char* field :
       {"corpus", "bogus", "attack.mask_count", "attack.gamma", "generator.type"}) {
    EXPECT_NE(msg.find(field), std::string::npos) << field << " missing from: " << msg;
  }
}

TEST(RunConfig, RemoteNeedsItsBlockAndNeverAKey) {
  EXPECT_NE(problems({{"generator", {{"type", "remote"}}}}).find("generator.remote"),
            std::string::npos);
  const std::string msg = problems(
      {{"generator",
        {{"type", "remote"},
         {"remote", {{"base_url", "http://h/v1"}, {"model", "m"}, {"api_key", "sk-123"}}}}}});
  EXPECT_NE(msg.find("generator.remote.api_key"), std::string::npos) << msg;
  EXPECT_NE(msg.find("api_key_env"), std::string::npos);
  EXPECT_EQ(msg.find("sk-123"), std::string::npos);
}

}  // namespace
}  // namespace maskmia
