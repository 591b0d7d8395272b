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

#include "maskmia/masker.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <set>
#include <sstream>

#include "maskmia/error.hpp"
#include "maskmia/random.hpp"

namespace maskmia {
namespace {

constexpr std::string_view kPlainMask = "[Mask]";

struct Chosen {
  std::size_t word_index;
  std::size_t begin;  // absolute byte range in the source
  std::size_t end;
  std::vector<std::string> answers;
};

std::string text_with_masks(std::string_view text, const std::vector<Chosen>& chosen,
                            std::size_t upto) {
  std::string out;
  std::size_t pos = 0;
  for (const Chosen& c : chosen) {
    if (c.begin >= upto) break;
    out += text.substr(pos, c.begin - pos);
    out += kPlainMask;
    pos = c.end;
  }
  if (pos < upto) out += text.substr(pos, upto - pos);
  return out;
}

MaskedDocument assemble(const Document& doc, int mask_count, const std::vector<Chosen>& chosen) {
  MaskedDocument md;
  md.source_id = doc.id;
  md.mask_count = mask_count;
  std::size_t pos = 0;
  int slot = 0;
  for (const Chosen& c : chosen) {
    ++slot;
    md.masked_text += doc.text.substr(pos, c.begin - pos);
    md.masked_text += slot_label(slot);
    md.answers[slot] = c.answers;
    md.word_indices.push_back(c.word_index);
    pos = c.end;
  }
  md.masked_text += doc.text.substr(pos);
  return md;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace

std::string slot_label(int slot) { return "[Mask_" + std::to_string(slot) + "]"; }

std::vector<SlotSpan> find_slots(std::string_view text) {
  std::vector<SlotSpan> out;
  constexpr std::string_view open = "[Mask_";
  std::size_t pos = 0;
  while ((pos = text.find(open, pos)) != std::string_view::npos) {
    std::size_t j = pos + open.size();
    const std::size_t digits = j;
    while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
    if (j > digits && j - digits < 9 && j < text.size() && text[j] == ']') {
      out.push_back({pos, j + 1, std::stoi(std::string(text.substr(digits, j - digits)))});
      pos = j + 1;
    } else {
      pos += open.size();
    }
  }
  return out;
}

int rank_word(const LmScorer& scorer, std::string_view word, std::string_view prefix) {
  if (word.empty()) throw InvalidArgument("rank_word: empty word");
  return scorer.rank_of(word, prefix);
}

int rank_fragmented(const LmScorer& scorer, std::string_view prefix,
                    const FragmentedWord& fragment) {
  if (fragment.token_count() < 2) {
    throw InvalidArgument("'" + fragment.surface + "' is not fragmented (" +
                          std::to_string(fragment.token_count()) + " token)");
  }
  if (fragment.corrected) return rank_word(scorer, *fragment.corrected, prefix);
  std::string running(prefix);
  int worst = 0;
  for (const std::string& tok : fragment.tokens) {
    worst = std::max(worst, rank_word(scorer, tok, running));
    running += tok;
  }
  return worst;
}

int rank_fragmented(const LmScorer& scorer, const WordSequence& words, std::size_t position,
                    const FragmentedWord& fragment) {
  if (position >= words.size() || fragment.word_index != position ||
      words[position].surface != fragment.surface) {
    throw InvalidArgument("fragment '" + fragment.surface + "' does not occupy position " +
                          std::to_string(position));
  }
  return rank_fragmented(scorer, std::string_view(words.text()).substr(0, words[position].offset),
                         fragment);
}

std::vector<std::pair<std::size_t, std::size_t>> subtext_bounds(std::size_t n_words,
                                                                int mask_count) {
  if (mask_count < 1) throw InvalidArgument("mask count must be >= 1");
  const auto m = static_cast<std::size_t>(mask_count);
  const std::size_t base = n_words / m;
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < m; ++i) {
    out.emplace_back(i * base, i + 1 == m ? n_words : (i + 1) * base);
  }
  return out;
}

MaskingRun run_mask_generation(const Document& doc, int mask_count, const MaskerParts& parts,
                               const MaskingOptions& options) {
  const WordSequence words = segment(doc.text, parts.stopwords);
  const auto bounds = subtext_bounds(words.size(), mask_count);

  std::map<std::size_t, FragmentedWord> fragments;
  if (options.fragment_units) {
    auto found = extract_fragmented_words(words, parts.tokenizer);
    if (options.spell_correction) found = correct_words(words, std::move(found), parts.corrector);
    for (auto& f : found) fragments.emplace(f.word_index, std::move(f));
  }

  MaskingRun run;
  std::vector<Chosen> chosen;
  std::vector<bool> masked(words.size(), false);
  for (std::size_t s = 0; s < bounds.size(); ++s) {
    const auto [first, last] = bounds[s];
    std::optional<Chosen> best;
    int best_rank = kSkippedRank;
    auto consider = [&](std::size_t j, std::size_t b, std::size_t e, int rank,
                        std::vector<std::string> answers) {
      run.ranks.push_back({s, j, b, e, rank});
      if (rank > best_rank) {
        best_rank = rank;
        best = Chosen{j, words[j].offset + b, words[j].offset + e, std::move(answers)};
      }
    };
    for (std::size_t j = first; j < last; ++j) {
      const Word& w = words[j];
      const bool adjacent = (j > 0 && masked[j - 1]) || (j + 1 < words.size() && masked[j + 1]);
      if (w.is_punctuation || w.is_stopword || adjacent) {
        run.ranks.push_back({s, j, 0, w.surface.size(), kSkippedRank});
        continue;
      }
      const std::string prefix = text_with_masks(doc.text, chosen, w.offset);
      if (options.fragment_units) {
        if (auto f = fragments.find(j); f != fragments.end()) {
          std::vector<std::string> answers{w.surface};
          if (f->second.corrected) answers.push_back(*f->second.corrected);
          consider(j, 0, w.surface.size(), rank_fragmented(parts.scorer, prefix, f->second),
                   std::move(answers));
        } else {
          consider(j, 0, w.surface.size(), rank_word(parts.scorer, w.surface, prefix), {w.surface});
        }
        continue;
      }
      const auto tokens = parts.tokenizer.tokenize(w.surface);
      if (tokens.size() < 2) {
        consider(j, 0, w.surface.size(), rank_word(parts.scorer, w.surface, prefix), {w.surface});
        continue;
      }
      std::string running = prefix;
      std::size_t pos = 0;
      for (const std::string& tok : tokens) {
        consider(j, pos, pos + tok.size(), rank_word(parts.scorer, tok, running), {tok});
        running += tok;
        pos += tok.size();
      }
    }
    if (!best) throw InsufficientMaskableWords(static_cast<int>(s) + 1, mask_count);
    masked[best->word_index] = true;
    chosen.push_back(std::move(*best));
  }
  run.document = assemble(doc, mask_count, chosen);
  return run;
}

MaskedDocument generate_masks(const Document& doc, int mask_count, const LmScorer& scorer,
                              const TokenizerAdapter& tokenizer, const SpellCorrector& corrector,
                              const MaskingOptions& options, const StopwordList& stopwords) {
  return run_mask_generation(doc, mask_count, MaskerParts{scorer, tokenizer, corrector, stopwords},
                             options)
      .document;
}

std::string apply_answers(const MaskedDocument& masked,
                          const std::map<int, std::string>& predictions) {
  for (const auto& [slot, text] : predictions) {
    if (slot < 1 || slot > masked.mask_count) {
      throw InvalidArgument("unknown slot " + std::to_string(slot) + " (document has " +
                            std::to_string(masked.mask_count) + ")");
    }
  }
  std::string out;
  std::size_t pos = 0;
  for (const SlotSpan& ref : find_slots(masked.masked_text)) {
    auto it = predictions.find(ref.slot);
    if (it == predictions.end()) continue;
    out += std::string_view(masked.masked_text).substr(pos, ref.begin - pos);
    out += it->second;
    pos = ref.end;
  }
  out += std::string_view(masked.masked_text).substr(pos);
  return out;
}

std::string restore_original(const MaskedDocument& masked) {
  std::map<int, std::string> originals;
  for (const auto& [slot, answers] : masked.answers) {
    if (!answers.empty()) originals[slot] = answers.front();
  }
  return apply_answers(masked, originals);
}

nlohmann::json to_json(const MaskedDocument& masked) {
  nlohmann::json answers = nlohmann::json::object();
  for (const auto& [slot, set] : masked.answers) answers[std::to_string(slot)] = set;
  return {{"source_id", masked.source_id},
          {"mask_count", masked.mask_count},
          {"masked_text", masked.masked_text},
          {"answers", answers},
          {"word_indices", masked.word_indices}};
}

MaskedDocument masked_document_from_json(const nlohmann::json& j) {
  try {
    MaskedDocument md;
    md.source_id = j.at("source_id").get<std::string>();
    md.mask_count = j.at("mask_count").get<int>();
    md.masked_text = j.at("masked_text").get<std::string>();
    for (const auto& [key, value] : j.at("answers").items()) {
      md.answers[std::stoi(key)] = value.get<std::vector<std::string>>();
    }
    if (j.contains("word_indices")) {
      md.word_indices = j["word_indices"].get<std::vector<std::size_t>>();
    }
    return md;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed masked document: ") + e.what());
  } catch (const std::invalid_argument&) {
    throw ParseError("malformed masked document: non-numeric slot key");
  }
}

// ---------------------------------------------------------------------------

MaskedDocument ProxyLmMasker::mask(const Document& doc, int mask_count) const {
  return run_mask_generation(doc, mask_count, parts_, options_).document;
}

MaskedDocument RandomMasker::mask(const Document& doc, int mask_count) const {
  const WordSequence words = segment(doc.text, *stopwords_);
  const auto bounds = subtext_bounds(words.size(), mask_count);
  Rng rng(mix_seed(seed_, doc.id + "#" + std::to_string(mask_count)));
  std::vector<Chosen> chosen;
  for (std::size_t s = 0; s < bounds.size(); ++s) {
    std::vector<std::size_t> pool;
    for (std::size_t j = bounds[s].first; j < bounds[s].second; ++j) {
      if (!words[j].is_punctuation) pool.push_back(j);
    }
    if (pool.empty()) throw InsufficientMaskableWords(static_cast<int>(s) + 1, mask_count);
    const std::size_t j = pick(pool, rng);
    chosen.push_back({j, words[j].offset, words[j].end(), {words[j].surface}});
  }
  return assemble(doc, mask_count, chosen);
}

std::string llm_mask_prompt(int mask_count, std::string_view text) {
  std::ostringstream out;
  out << "Select " << mask_count
      << " words or phrases from the following document that would be difficult to guess "
         "without seeing the document. Return them as a numbered list, then rewrite the "
         "document replacing each with [Mask_i]. Document: "
      << text;
  return out.str();
}

MaskedDocument parse_llm_masking(const Document& doc, int mask_count, std::string_view response) {
  std::map<int, std::string> listed;
  std::size_t pos = 0;
  bool in_list = false;
  std::size_t body_start = std::string_view::npos;
  while (pos < response.size()) {
    std::size_t eol = response.find('\n', pos);
    if (eol == std::string_view::npos) eol = response.size();
    const std::string line = trim(response.substr(pos, eol - pos));
    std::size_t k = 0;
    while (k < line.size() && std::isdigit(static_cast<unsigned char>(line[k]))) ++k;
    const bool numbered = k > 0 && k < 9 && k < line.size() && (line[k] == '.' || line[k] == ')');
    if (numbered) {
      listed[std::stoi(line.substr(0, k))] = trim(std::string_view(line).substr(k + 1));
      in_list = true;
    } else if (!line.empty() || in_list) {
      if (!line.empty()) {
        body_start = pos;
        break;
      }
    }
    pos = eol + 1;
  }
  if (body_start == std::string_view::npos) throw MaskRejected("no rewritten document found");
  MaskedDocument md;
  md.source_id = doc.id;
  md.mask_count = mask_count;
  md.masked_text = trim(response.substr(body_start));
  const auto slots = find_slots(md.masked_text);
  std::set<int> seen;
  for (const SlotSpan& s : slots) seen.insert(s.slot);
  if (slots.size() != static_cast<std::size_t>(mask_count) || seen.size() != slots.size() ||
      *seen.begin() != 1 || *seen.rbegin() != mask_count) {
    throw MaskRejected("expected " + std::to_string(mask_count) + " distinct slots, found " +
                       std::to_string(slots.size()));
  }
  for (int k = 1; k <= mask_count; ++k) {
    auto it = listed.find(k);
    if (it == listed.end()) throw MaskRejected("no answer listed for slot " + std::to_string(k));
    md.answers[k] = {it->second};
  }
  if (restore_original(md) != doc.text) {
    throw MaskRejected("rewritten document diverges from the source");
  }
  return md;
}

MaskedDocument LlmMasker::mask(const Document& doc, int mask_count) const {
  const Generation g = generator_->generate({"", llm_mask_prompt(mask_count, doc.text)});
  return parse_llm_masking(doc, mask_count, g.text);
}

}  // namespace maskmia
