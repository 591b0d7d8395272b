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

#include "maskmia/baselines.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>

#include "maskmia/error.hpp"

namespace maskmia {
namespace {

std::vector<std::string_view> whitespace_words(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    if (j > i) out.push_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string join(std::span<const std::string_view> words) {
  std::string out;
  for (auto w : words) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

// Quantile grid of the distinct sorted values, at most `grid` points.
std::vector<double> quantile_grid(std::vector<double> values, std::size_t grid) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  if (values.size() <= grid) return values;
  std::vector<double> out;
  for (std::size_t i = 0; i < grid; ++i)
    out.push_back(values[i * (values.size() - 1) / (grid - 1)]);
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double f1_score(std::size_t tp, std::size_t fp, std::size_t fn) {
  if (tp == 0) return 0.0;
  const double p = static_cast<double>(tp) / static_cast<double>(tp + fp);
  const double r = static_cast<double>(tp) / static_cast<double>(tp + fn);
  return 2.0 * p * r / (p + r);
}

double span_of(std::span<const double> v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi - *lo > 0.0 ? *hi - *lo : 1.0;
}

}  // namespace

std::string_view to_string(BaselineMethod m) {
  switch (m) {
    case BaselineMethod::kRagMia:
      return "rag_mia";
    case BaselineMethod::kS2miaS:
      return "s2mia_s";
    case BaselineMethod::kS2miaSp:
      return "s2mia_sp";
    case BaselineMethod::kMinK:
      break;
  }
  return "min_k";
}

BaselineMethod parse_baseline_method(std::string_view name) {
  std::string n(name);
  std::replace(n.begin(), n.end(), '-', '_');
  for (auto m : {BaselineMethod::kRagMia, BaselineMethod::kS2miaS, BaselineMethod::kS2miaSp,
                 BaselineMethod::kMinK}) {
    if (n == to_string(m)) return m;
  }
  throw InvalidArgument("unknown baseline method '" + std::string(name) +
                        "' (expected rag-mia, s2mia-s, s2mia-sp or min-k)");
}

nlohmann::json to_json(const BaselineScore& s) {
  return {{"source_id", s.source_id},
          {"method", to_string(s.method)},
          {"logit", s.logit},
          {"raw", s.raw}};
}

bool is_affirmative(std::string_view response) {
  std::size_t i = 0;
  while (i < response.size() && !std::isalpha(static_cast<unsigned char>(response[i]))) ++i;
  std::size_t j = i;
  while (j < response.size() && std::isalpha(static_cast<unsigned char>(response[j]))) ++j;
  const std::string token = to_lower(response.substr(i, j - i));
  return token == "yes";
}

BaselineScore rag_mia(const Document& doc, const RagSystem& rag, std::size_t k) {
  const RagAnswer reply = rag.answer(presence_query(doc.text), k, doc.id);
  const bool yes = is_affirmative(reply.response);
  return {doc.id,
          BaselineMethod::kRagMia,
          yes ? 1.0 : 0.0,
          {{"answer", yes ? "yes" : "no"}, {"response", reply.response}}};
}

HalfSplit split_halves(std::string_view text) {
  const auto words = whitespace_words(text);
  if (words.size() < 2) throw InvalidArgument("document too short to split into halves");
  const std::size_t mid = words.size() / 2;
  return {join(std::span(words).first(mid)), join(std::span(words).subspan(mid))};
}

double perplexity(std::span<const TokenLogprob> logprobs) {
  if (logprobs.empty()) throw InvalidArgument("perplexity of an empty token sequence");
  double sum = 0.0;
  for (const auto& t : logprobs) sum += t.logprob;
  return std::exp(-sum / static_cast<double>(logprobs.size()));
}

S2miaObservation s2mia_observe(const Document& doc, const RagSystem& rag, std::size_t k,
                               const Embedder& embedder, bool need_perplexity) {
  if (need_perplexity && !rag.generator().supports_logprobs()) {
    throw CapabilityError("s2mia with perplexity requires token logprobs");
  }
  const HalfSplit halves = split_halves(doc.text);
  const RagAnswer reply = rag.answer(halves.first, k, doc.id);
  S2miaObservation obs;
  obs.source_id = doc.id;
  obs.similarity = static_cast<double>(
      cosine<float>(embedder.embed(reply.response), embedder.embed(halves.second)));
  if (need_perplexity) {
    if (!reply.logprobs) throw CapabilityError("generator returned no logprobs");
    // An empty reply has no surprise to measure; treat it as maximal.
    obs.perplexity =
        reply.logprobs->empty() ? std::numeric_limits<double>::max() : perplexity(*reply.logprobs);
  }
  return obs;
}

BaselineScore s2mia_s_score(const S2miaObservation& obs) {
  return {obs.source_id,
          BaselineMethod::kS2miaS,
          std::clamp((obs.similarity + 1.0) / 2.0, 0.0, 1.0),
          {{"similarity", obs.similarity}}};
}

ThresholdClassifier::ThresholdClassifier(double sim_threshold, double ppl_threshold,
                                         double sim_range, double ppl_range)
    : sim_threshold_(sim_threshold),
      ppl_threshold_(ppl_threshold),
      sim_range_(sim_range > 0.0 ? sim_range : 1.0),
      ppl_range_(ppl_range > 0.0 ? ppl_range : 1.0) {}

ThresholdClassifier ThresholdClassifier::fit(std::span<const S2miaObservation> train,
                                             std::span<const bool> labels, std::size_t grid) {
  if (train.empty() || train.size() != labels.size()) {
    throw InvalidArgument("classifier needs one label per training observation");
  }
  if (grid < 2) throw InvalidArgument("classifier grid must have at least two points");
  std::vector<double> sims, ppls;
  for (const auto& o : train) {
    if (!o.perplexity)
      throw InvalidArgument("training observation '" + o.source_id + "' lacks perplexity");
    sims.push_back(o.similarity);
    ppls.push_back(*o.perplexity);
  }
  ThresholdClassifier best(0.0, 0.0, span_of(sims), span_of(ppls));
  double best_f1 = -1.0;
  for (double ts : quantile_grid(sims, grid)) {
    for (double tp : quantile_grid(ppls, grid)) {
      std::size_t t = 0, f = 0, n = 0;
      for (std::size_t i = 0; i < train.size(); ++i) {
        const bool pred = sims[i] >= ts && ppls[i] <= tp;
        t += pred && labels[i];
        f += pred && !labels[i];
        n += !pred && labels[i];
      }
      const double f1 = f1_score(t, f, n);
      if (f1 > best_f1) {
        best_f1 = f1;
        best.sim_threshold_ = ts;
        best.ppl_threshold_ = tp;
      }
    }
  }
  best.train_f1_ = best_f1;
  return best;
}

bool ThresholdClassifier::predict(const S2miaObservation& obs) const {
  if (!obs.perplexity) throw InvalidArgument("observation lacks perplexity");
  return obs.similarity >= sim_threshold_ && *obs.perplexity <= ppl_threshold_;
}

double ThresholdClassifier::score(const S2miaObservation& obs) const {
  if (!obs.perplexity) throw InvalidArgument("observation lacks perplexity");
  const double margin = std::min((obs.similarity - sim_threshold_) / sim_range_,
                                 (ppl_threshold_ - *obs.perplexity) / ppl_range_);
  return std::clamp(0.5 + 0.5 * margin, 0.0, 1.0);
}

BaselineScore s2mia_sp_score(const S2miaObservation& obs, const ThresholdClassifier& clf) {
  return {obs.source_id,
          BaselineMethod::kS2miaSp,
          clf.score(obs),
          {{"similarity", obs.similarity},
           {"perplexity", *obs.perplexity},
           {"member", clf.predict(obs)}}};
}

double min_k_raw(std::span<const double> logprobs, double k_percent) {
  if (logprobs.empty()) throw InvalidArgument("min-k of an empty token sequence");
  if (!(k_percent > 0.0 && k_percent <= 100.0)) throw InvalidArgument("k% must lie in (0, 100]");
  const double exact = k_percent / 100.0 * static_cast<double>(logprobs.size());
  const auto count = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(exact - 1e-9)), 1,
                                             logprobs.size());
  std::vector<double> sorted(logprobs.begin(), logprobs.end());
  std::partial_sort(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(count),
                    sorted.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < count; ++i) sum += sorted[i];
  return sum / static_cast<double>(count);
}

std::vector<BaselineScore> min_k_from_logprobs(std::span<const Document> docs,
                                               std::span<const std::vector<double>> logprobs,
                                               double k_percent) {
  if (docs.size() != logprobs.size()) throw InvalidArgument("one logprob vector per document");
  std::vector<BaselineScore> out;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const double raw = min_k_raw(logprobs[i], k_percent);
    out.push_back(
        {docs[i].id, BaselineMethod::kMinK, 0.0, {{"min_k_mean", raw}, {"k_percent", k_percent}}});
  }
  if (out.empty()) return out;
  const auto [lo,
              hi] = std::minmax_element(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.raw["min_k_mean"].template get<double>() < b.raw["min_k_mean"].template get<double>();
  });
  const double low = lo->raw["min_k_mean"].get<double>();
  const double high = hi->raw["min_k_mean"].get<double>();
  for (auto& s : out) {
    const double raw = s.raw["min_k_mean"].get<double>();
    s.logit = high > low ? (raw - low) / (high - low) : 0.5;
  }
  return out;
}

std::vector<BaselineScore> min_k_prob(std::span<const Document> docs, const Generator& generator,
                                      double k_percent) {
  if (!generator.supports_logprobs()) throw CapabilityError("min-k requires token logprobs");
  std::vector<std::vector<double>> all;
  for (const Document& d : docs) {
    std::vector<double> lp;
    for (const auto& t : generator.text_logprobs(d.text)) lp.push_back(t.logprob);
    all.push_back(std::move(lp));
  }
  return min_k_from_logprobs(docs, all, k_percent);
}

}  // namespace maskmia
