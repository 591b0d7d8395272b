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

#ifndef MASKMIA_RESOURCES_HPP_
#define MASKMIA_RESOURCES_HPP_

#include <filesystem>
#include <string_view>

namespace maskmia {

// Directory holding the bundled stopword list, vocabulary, lexicon and
// synonym table. $MASKMIA_DATA_DIR overrides the build-time location.
std::filesystem::path data_dir();

inline std::filesystem::path data_file(std::string_view name) {
  return data_dir() / std::filesystem::path(name);
}

}  // namespace maskmia

#endif  // MASKMIA_RESOURCES_HPP_
