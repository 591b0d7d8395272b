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

#include "maskmia/attack.hpp"

#include <cctype>
#include <cmath>
#include <sstream>
#include <vector>

#include "maskmia/error.hpp"

namespace maskmia {
namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) !=
        std::tolower(static_cast<unsigned char>(b[i]))) {
      return false;
    }
  }
  return true;
}

// Parses "[mask_<n>]" with optional whitespace, then ':' and the answer.
std::optional<std::pair<int, std::string_view>> parse_line(std::string_view line) {
  line = trim(line);
  constexpr std::string_view kLabel = "[mask_";
  if (line.size() < kLabel.size() || !iequals(line.substr(0, kLabel.size()), kLabel)) {
    return std::nullopt;
  }
  std::size_t i = kLabel.size();
  const std::size_t digits = i;
  while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
  if (i == digits || i - digits > 6 || i >= line.size() || line[i] != ']') return std::nullopt;
  const int slot = std::stoi(std::string(line.substr(digits, i - digits)));
  ++i;
  while (i < line.size() && is_space(line[i])) ++i;
  if (i >= line.size() || line[i] != ':') return std::nullopt;
  return std::pair{slot, trim(line.substr(i + 1))};
}

}  // namespace

void AttackConfig::validate() const {
  std::vector<std::string> bad;
  if (mask_count < 1) bad.push_back("mask_count must be >= 1");
  if (!(gamma > 0.0 && gamma <= 1.0)) bad.push_back("gamma must lie in (0, 1]");
  if (top_k < 1) bad.push_back("top_k must be >= 1");
  if (bad.empty()) return;
  std::string msg = "invalid attack config:";
  for (const auto& b : bad) msg += "\n  " + b;
  throw ConfigError(msg);
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::kMember:
      return "member";
    case Verdict::kNonMember:
      return "non_member";
    case Verdict::kInconclusive:
      break;
  }
  return "inconclusive";
}

std::map<int, std::string> parse_response(std::string_view response, int mask_count) {
  std::map<int, std::string> out;
  std::size_t pos = 0;
  while (pos <= response.size()) {
    std::size_t eol = response.find('\n', pos);
    if (eol == std::string_view::npos) eol = response.size();
    if (auto parsed = parse_line(response.substr(pos, eol - pos))) {
      const auto [slot, answer] = *parsed;
      if (slot >= 1 && slot <= mask_count) out.emplace(slot, std::string(answer));
    }
    pos = eol + 1;
  }
  return out;
}

std::string normalize_answer(std::string_view answer) {
  std::size_t b = 0, e = answer.size();
  while (b < e && (is_space(answer[b]) || is_punct(answer[b]))) ++b;
  while (e > b && (is_space(answer[e - 1]) || is_punct(answer[e - 1]))) --e;
  std::string out;
  bool gap = false;
  for (std::size_t i = b; i < e; ++i) {
    if (is_space(answer[i])) {
      gap = true;
      continue;
    }
    if (gap) out += ' ';
    gap = false;
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(answer[i])));
  }
  return out;
}

Grade grade(const MaskedDocument& masked, const std::map<int, std::string>& predictions) {
  Grade g;
  for (const auto& [slot, answers] : masked.answers) {
    SlotResult r;
    if (auto it = predictions.find(slot); it != predictions.end()) {
      r.predicted = it->second;
      const std::string p = normalize_answer(it->second);
      for (const auto& a : answers) r.matched = r.matched || normalize_answer(a) == p;
    }
    g.correct_count += r.matched ? 1 : 0;
    g.per_slot.emplace(slot, std::move(r));
  }
  return g;
}

Verdict decide(int correct_count, int mask_count, double gamma) {
  // The epsilon keeps e.g. 0.3 * 10 from rounding above 3.
  const double bar = gamma * static_cast<double>(mask_count);
  return static_cast<double>(correct_count) > bar + 1e-9 ? Verdict::kMember : Verdict::kNonMember;
}

AttackOutcome attack_masked(const MaskedDocument& masked, const AttackConfig& cfg,
                            const RagSystem& rag) {
  const RagAnswer reply = rag.answer(cloze_query(masked.masked_text), cfg.top_k, masked.source_id);
  Grade g = grade(masked, parse_response(reply.response, masked.mask_count));
  AttackOutcome out;
  out.source_id = masked.source_id;
  out.mask_count = masked.mask_count;
  out.correct_count = g.correct_count;
  out.accuracy = static_cast<double>(g.correct_count) / static_cast<double>(masked.mask_count);
  out.verdict = decide(g.correct_count, masked.mask_count, cfg.gamma);
  out.retrieved_target = reply.retrieval.contains(masked.source_id);
  out.per_slot = std::move(g.per_slot);
  return out;
}

AttackOutcome infer_membership(const Document& doc, const AttackConfig& cfg, const RagSystem& rag,
                               const MaskStrategy& masker) {
  MaskedDocument masked;
  try {
    masked = masker.mask(doc, cfg.mask_count);
  } catch (const InsufficientMaskableWords& e) {
    AttackOutcome out;
    out.source_id = doc.id;
    out.mask_count = cfg.mask_count;
    out.note = e.what();
    return out;
  } catch (const MaskRejected& e) {
    AttackOutcome out;
    out.source_id = doc.id;
    out.mask_count = cfg.mask_count;
    out.note = std::string("mask rejected: ") + e.what();
    return out;
  }
  return attack_masked(masked, cfg, rag);
}

nlohmann::json to_json(const AttackOutcome& o) {
  nlohmann::json slots = nlohmann::json::object();
  for (const auto& [slot, r] : o.per_slot) {
    slots[std::to_string(slot)] = {
        {"predicted", r.predicted ? nlohmann::json(*r.predicted) : nlohmann::json(nullptr)},
        {"matched", r.matched}};
  }
  nlohmann::json j = {{"source_id", o.source_id},
                      {"mask_count", o.mask_count},
                      {"correct_count", o.correct_count},
                      {"accuracy", o.accuracy},
                      {"verdict", to_string(o.verdict)},
                      {"retrieved_target", o.retrieved_target},
                      {"per_slot", slots}};
  if (!o.note.empty()) j["note"] = o.note;
  return j;
}

AttackOutcome attack_outcome_from_json(const nlohmann::json& j) {
  try {
    AttackOutcome o;
    o.source_id = j.at("source_id").get<std::string>();
    o.mask_count = j.at("mask_count").get<int>();
    o.correct_count = j.at("correct_count").get<int>();
    o.accuracy = j.at("accuracy").get<double>();
    const std::string v = j.at("verdict").get<std::string>();
    o.verdict = v == "member"       ? Verdict::kMember
                : v == "non_member" ? Verdict::kNonMember
                                    : Verdict::kInconclusive;
    o.retrieved_target = j.at("retrieved_target").get<bool>();
    for (const auto& [key, value] : j.at("per_slot").items()) {
      SlotResult r;
      if (!value.at("predicted").is_null()) r.predicted = value["predicted"].get<std::string>();
      r.matched = value.at("matched").get<bool>();
      o.per_slot[std::stoi(key)] = std::move(r);
    }
    o.note = j.value("note", "");
    return o;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed attack outcome: ") + e.what());
  }
}

}  // namespace maskmia
