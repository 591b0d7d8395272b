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

#include "maskmia/synth.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <set>

#include "json.hpp"
#include "maskmia/error.hpp"
#include "maskmia/resources.hpp"

namespace maskmia {
namespace {

using Json = nlohmann::json;
using Variants = std::vector<std::vector<std::string>>;

struct Topic {
  std::string name;
  std::map<std::string, std::vector<std::string>> pools;  // symptom, part, test
  Variants patient;
  Variants doctor;
};

struct Templates {
  std::map<std::string, std::vector<std::string>> pools;  // sex, duration, ...
  Variants opening;
  Variants closing;
  std::vector<std::string> syllables;
  std::vector<std::string> drug_suffixes;
  std::vector<Topic> topics;
};

Templates load_templates(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open templates " + path.string());
  try {
    const Json j = Json::parse(in);
    Templates t;
    for (const auto& [key, value] : j.at("common").items()) {
      if (key == "opening") {
        t.opening = value.get<Variants>();
      } else if (key == "closing") {
        t.closing = value.get<Variants>();
      } else {
        t.pools[key] = value.get<std::vector<std::string>>();
      }
    }
    t.syllables = j.at("syllables").get<std::vector<std::string>>();
    t.drug_suffixes = j.at("drug_suffixes").get<std::vector<std::string>>();
    for (const auto& tj : j.at("topics")) {
      Topic topic;
      topic.name = tj.at("name").get<std::string>();
      for (const char* pool : {"symptom", "part", "test"}) {
        topic.pools[pool] = tj.at(pool).get<std::vector<std::string>>();
      }
      topic.patient = tj.at("patient").get<Variants>();
      topic.doctor = tj.at("doctor").get<Variants>();
      t.topics.push_back(std::move(topic));
    }
    if (t.topics.empty() || t.syllables.empty() || t.drug_suffixes.empty()) {
      throw ParseError("templates need topics, syllables and drug suffixes");
    }
    return t;
  } catch (const Json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

// Names and slot values shared by a document and its follow-ups.
struct Case {
  std::size_t topic = 0;
  std::map<std::string, std::string> values;
};

std::string invent(const std::vector<std::string>& syllables, std::size_t parts, Rng& rng) {
  std::string out;
  for (std::size_t i = 0; i < parts; ++i) out += pick(syllables, rng);
  return out;
}

std::string fill(std::string_view pattern, const std::map<std::string, std::string>& values) {
  std::string out;
  std::size_t pos = 0;
  while (pos < pattern.size()) {
    const std::size_t open = pattern.find('{', pos);
    if (open == std::string_view::npos) break;
    const std::size_t close = pattern.find('}', open);
    if (close == std::string_view::npos) throw ParseError("unterminated placeholder");
    out += pattern.substr(pos, open - pos);
    const std::string key(pattern.substr(open + 1, close - open - 1));
    auto it = values.find(key);
    if (it == values.end()) throw ParseError("unknown placeholder {" + key + "}");
    out += it->second;
    pos = close + 1;
  }
  out += pattern.substr(pos);
  return out;
}

void render(const Variants& slots, const std::map<std::string, std::string>& values, Rng& rng,
            std::string& out) {
  for (const auto& variants : slots) {
    out += ' ';
    out += fill(pick(variants, rng), values);
  }
}

}  // namespace

Corpus synth_corpus(const SynthSpec& spec) {
  return synth_corpus(spec, data_file("synth_templates.json"));
}

Corpus synth_corpus(const SynthSpec& spec, const std::filesystem::path& templates) {
  if (spec.documents == 0) throw InvalidArgument("synth corpus needs at least one document");
  if (!(spec.follow_up_rate >= 0.0 && spec.follow_up_rate <= 1.0)) {
    throw InvalidArgument("follow-up rate must lie in [0, 1]");
  }
  const Templates t = load_templates(templates);
  Rng rng(mix_seed(spec.seed, "synth"));
  std::set<std::string> used_names;
  auto unique_name = [&](std::size_t min_parts, const std::string& suffix) {
    for (;;) {
      const std::size_t parts = min_parts + uniform_index(rng, 2);
      std::string name = invent(t.syllables, parts, rng) + suffix;
      if (used_names.insert(name).second) return name;
    }
  };

  std::vector<Case> cases;
  std::vector<Document> docs;
  const int width = static_cast<int>(std::to_string(spec.documents).size());
  for (std::size_t d = 0; d < spec.documents; ++d) {
    Case c;
    if (!cases.empty() && bernoulli(rng, spec.follow_up_rate)) {
      c = cases[uniform_index(rng, cases.size())];
    } else {
      c.topic = uniform_index(rng, t.topics.size());
      c.values["age"] = std::to_string(18 + uniform_index(rng, 60));
      for (const char* key : {"sex", "relative", "dose"})
        c.values[key] = pick(t.pools.at(key), rng);
      c.values["drug"] = unique_name(2, pick(t.drug_suffixes, rng));
      std::string doctor = unique_name(2, "");
      doctor[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(doctor[0])));
      c.values["doctor"] = std::move(doctor);
    }
    const Topic& topic = t.topics[c.topic];
    std::map<std::string, std::string> values = c.values;
    values["duration"] = pick(t.pools.at("duration"), rng);
    values["times"] = pick(t.pools.at("times"), rng);
    values["part"] = pick(topic.pools.at("part"), rng);
    values["test"] = pick(topic.pools.at("test"), rng);
    const auto& symptoms = topic.pools.at("symptom");
    const std::size_t s1 = uniform_index(rng, symptoms.size());
    const std::size_t s2 = (s1 + 1 + uniform_index(rng, symptoms.size() - 1)) % symptoms.size();
    values["symptom"] = symptoms[s1];
    values["symptom2"] = symptoms[s2];

    std::string text = "Patient:";
    render(t.opening, values, rng, text);
    render(topic.patient, values, rng, text);
    text += " Doctor:";
    render(topic.doctor, values, rng, text);
    render(t.closing, values, rng, text);

    std::string id = std::to_string(d + 1);
    id = spec.id_prefix + "-" + std::string(static_cast<std::size_t>(width) - id.size(), '0') + id;
    docs.push_back({std::move(id), std::move(text)});
    cases.push_back(std::move(c));
  }
  return Corpus(std::move(docs));
}

std::string misspell(std::string_view word, Rng& rng) {
  static constexpr std::string_view kLetters = "abcdefghijklmnopqrstuvwxyz";
  if (word.size() < 3)
    throw InvalidArgument("word too short to misspell: '" + std::string(word) + "'");
  for (;;) {
    std::string out(word);
    // Keep the first letter so the case pattern survives.
    const std::size_t i = 1 + uniform_index(rng, out.size() - 1);
    switch (uniform_index(rng, 4)) {
      case 0:
        if (i + 1 < out.size()) std::swap(out[i], out[i + 1]);
        break;
      case 1:
        out.erase(i, 1);
        break;
      case 2:
        out.insert(i, 1, out[i]);
        break;
      default: {
        char c = kLetters[uniform_index(rng, kLetters.size())];
        if (std::isupper(static_cast<unsigned char>(out[i]))) {
          c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        }
        out[i] = c;
      }
    }
    if (out != word) return out;
  }
}

Corpus inject_misspellings(const Corpus& corpus, double rate, std::uint64_t seed,
                           std::size_t min_length) {
  if (!(rate >= 0.0 && rate <= 1.0)) throw InvalidArgument("misspelling rate must lie in [0, 1]");
  std::vector<Document> docs;
  for (const Document& d : corpus) {
    Rng rng(mix_seed(seed, d.id));
    const WordSequence words = segment(d.text);
    std::string text;
    for (std::size_t i = 0; i < words.size(); ++i) {
      text += words.separator_before(i);
      const std::string& w = words[i].surface;
      const bool eligible = w.size() >= std::max<std::size_t>(min_length, 3) && is_alphabetic(w);
      text += eligible && bernoulli(rng, rate) ? misspell(w, rng) : w;
    }
    text += words.trailing();
    docs.push_back({d.id, std::move(text)});
  }
  return Corpus(std::move(docs));
}

Corpus random_word_documents(std::size_t count, std::size_t min_words, std::size_t max_words,
                             std::uint64_t seed, std::span<const std::string> content_words,
                             std::span<const std::string> function_words) {
  if (min_words == 0 || min_words > max_words) throw InvalidArgument("bad word-count range");
  if (content_words.empty() || function_words.empty()) throw InvalidArgument("empty word pool");
  Rng rng(mix_seed(seed, "random-docs"));
  std::vector<Document> docs;
  for (std::size_t d = 0; d < count; ++d) {
    const std::size_t n = min_words + uniform_index(rng, max_words - min_words + 1);
    std::string text;
    bool last_content = false;
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint64_t roll = uniform_index(rng, 10);
      if (!last_content || roll < 5) {
        if (!text.empty()) text += ' ';
        text += content_words[uniform_index(rng, content_words.size())];
        last_content = true;
      } else if (roll < 9 || text.empty()) {
        text += ' ';
        text += function_words[uniform_index(rng, function_words.size())];
        last_content = false;
      } else {
        text += roll % 2 ? "," : ".";
        last_content = false;
      }
    }
    docs.push_back({"rnd-" + std::to_string(d + 1), std::move(text)});
  }
  return Corpus(std::move(docs));
}

}  // namespace maskmia
