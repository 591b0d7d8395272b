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

// Release gate: one PASS/FAIL line per criterion; exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <exception>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "fixtures.hpp"
#include "mask_oracle.hpp"
#include "maskmia/baselines.hpp"
#include "maskmia/config.hpp"
#include "maskmia/error.hpp"
#include "maskmia/experiment.hpp"
#include "maskmia/metrics.hpp"
#include "maskmia/random.hpp"
#include "maskmia/synth.hpp"

namespace maskmia {
namespace {

// Tolerances, pinned.
constexpr double kMaxInvariantSeconds = 60.0;
constexpr double kMinRecall = 0.95;
constexpr double kMinAuc = 0.95;
constexpr double kMinAccuracyGap = 0.5;
constexpr double kMaxEndToEndSeconds = 300.0;
constexpr double kMaxTopKSpread = 0.05;
constexpr double kMaxRerankShift = 0.02;
constexpr double kMinParaphrasedAuc = 0.75;
constexpr double kMisspellRate = 0.06;
constexpr std::uint64_t kMisspellSeed = 11;

struct Check {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::size_t workers() { return std::max(1u, std::thread::hardware_concurrency()); }

// The simulator setup shared by the end-to-end criteria.
struct Setup {
  explicit Setup(const Corpus& corpus)
      : backends(config),
        split(split_members(corpus, config.split)),
        eval(evaluation_documents(split, config.split)) {}

  RagSystem rag(DefenseConfig defense = {}) const {
    return RagSystem(split.members, backends.embedder(), backends.generator(), defense);
  }
  std::vector<LabeledOutcome> attack(const RagSystem& r, const AttackConfig& cfg) const {
    return run_attack(eval, cfg, r, ProxyLmMasker(backends.parts()), workers());
  }

  RunConfig config;
  Backends backends;
  MemberSplit split;
  std::vector<LabeledDocument> eval;
};

const Setup& clean_setup() {
  static const Setup setup(synth_corpus(SynthSpec{}));
  return setup;
}

const std::vector<LabeledOutcome>& clean_outcomes() {
  static const auto outcomes = clean_setup().attack(clean_setup().rag(), AttackConfig{});
  return outcomes;
}

// ---------------------------------------------------------------------------

Check mask_invariants() {
  const Setup& s = clean_setup();
  std::set<std::string> content;
  for (const Document& d : synth_corpus(SynthSpec{})) {
    const WordSequence seq = segment(d.text);
    for (const Word& w : seq.words()) {
      if (!w.is_punctuation && !w.is_stopword) content.insert(w.surface);
    }
  }
  Rng rng(17);
  std::vector<std::string> pool(content.begin(), content.end());
  // Typos add out-of-vocabulary, multi-token words to the pool.
  for (std::size_t i = 0, n = pool.size(); i < n; i += 9) {
    if (is_alphabetic(pool[i]) && pool[i].size() >= 5) pool.push_back(misspell(pool[i], rng));
  }
  const std::vector<std::string> function = StopwordList::bundled().sorted_words();
  const Corpus docs = random_word_documents(500, 60, 300, 23, pool, function);

  const ProxyLmMasker masker(s.backends.parts());
  std::size_t violations = 0, maskings = 0;
  std::string first;
  auto violate = [&](const std::string& what) {
    if (violations++ == 0) first = what;
  };
  const auto t0 = Clock::now();
  for (const Document& doc : docs) {
    const WordSequence seq = segment(doc.text);
    for (int m : {5, 10, 15, 20}) {
      ++maskings;
      MaskedDocument md;
      try {
        md = masker.mask(doc, m);
      } catch (const Error& e) {
        violate(doc.id + " M=" + std::to_string(m) + ": " + e.what());
        continue;
      }
      const auto slots = find_slots(md.masked_text);
      bool numbered = slots.size() == static_cast<std::size_t>(m) &&
                      md.answers.size() == static_cast<std::size_t>(m) &&
                      md.word_indices.size() == static_cast<std::size_t>(m);
      for (std::size_t i = 0; numbered && i < slots.size(); ++i) {
        numbered = slots[i].slot == static_cast<int>(i) + 1;
      }
      if (!numbered) violate(doc.id + " M=" + std::to_string(m) + ": slot count");
      std::vector<std::size_t> idx = md.word_indices;
      std::sort(idx.begin(), idx.end());
      for (std::size_t i = 0; i < idx.size(); ++i) {
        if (i > 0 && idx[i] <= idx[i - 1] + 1) violate(doc.id + ": adjacent masks");
        const Word& w = seq[idx[i]];
        if (w.is_stopword || w.is_punctuation) violate(doc.id + ": masked '" + w.surface + "'");
      }
      if (restore_original(md) != doc.text) violate(doc.id + ": round trip");
    }
  }
  const double secs = seconds_since(t0);
  return {violations == 0 && secs < kMaxInvariantSeconds,
          std::to_string(maskings) + " maskings, " + std::to_string(violations) + " violations" +
              (first.empty() ? "" : " (first: " + first + ")") + ", " + fmt(secs) + " s"};
}

Check argmax_oracle() {
  const std::vector<std::string> content = {
      "patient",  "doctor",   "fever",   "cough",   "tablet",  "morning", "clinic",
      "advice",   "dosage",   "severe",  "chronic", "allergy", "nausea",  "therapy",
      "symptom",  "canestan", "nearly",  "walked",  "swollen", "rash",    "ointment",
      "pharmacy", "x-ray",    "results", "ache",    "pain",    "dizzy",   "insulin"};
  const std::vector<std::string> function = {"the", "a",    "of",  "and", "to", "is",
                                             "was", "with", "for", "my",  "it", "in"};
  const testing::ToyScorer scorer(content, 29);
  const testing::ChunkTokenizer tokenizer(4);
  const IdentityCorrector identity;
  const ProxyLmMasker masker({scorer, tokenizer, identity});
  const Corpus docs = random_word_documents(100, 12, 40, 31, content, function);
  std::size_t mismatches = 0, resolved = 0, infeasible = 0;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const int m = 1 + static_cast<int>(i % 4);
    const auto expected = testing::exhaustive_mask_positions(docs[i].text, m, scorer, tokenizer);
    try {
      const MaskedDocument md = masker.mask(docs[i], m);
      if (!expected || md.word_indices != *expected) ++mismatches;
      ++resolved;
    } catch (const InsufficientMaskableWords&) {
      if (expected) ++mismatches;
      ++infeasible;
    }
  }
  return {mismatches == 0, std::to_string(mismatches) + " mismatches over 100 documents (" +
                               std::to_string(resolved) + " masked, " + std::to_string(infeasible) +
                               " infeasible)"};
}

Check retrieval_oracle() {
  const std::vector<std::string> words = {"alpha", "beta",  "gamma", "delta", "eps",    "zeta",
                                          "eta",   "theta", "iota",  "kappa", "lambda", "mu"};
  const Eigen::Index dim = 64;
  const testing::CountEmbedder embedder(dim);
  Rng rng(41);
  auto text = [&](std::size_t max_len) {
    std::string t;
    const std::size_t n = 1 + uniform_index(rng, max_len);
    for (std::size_t i = 0; i < n; ++i) t += (i ? " " : "") + pick(words, rng);
    return t;
  };
  // Integer bucket counts, scored independently of Eigen.
  auto buckets = [&](const std::string& t) {
    std::map<std::uint64_t, long> b;
    std::istringstream in(t);
    for (std::string w; in >> w;) ++b[fnv1a(w) % static_cast<std::uint64_t>(dim)];
    return b;
  };
  std::size_t mismatches = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + uniform_index(rng, 500);
    std::vector<Document> docs;
    for (std::size_t i = 0; i < n; ++i) {
      // Every fifth document repeats an earlier text, forcing exact ties.
      const bool dup = i > 0 && uniform_index(rng, 5) == 0;
      docs.push_back({"d" + std::to_string(i), dup ? docs[uniform_index(rng, i)].text : text(8)});
    }
    const std::size_t k = 1 + uniform_index(rng, 20);
    const std::string query = text(6);
    const auto qb = buckets(query);
    std::vector<std::pair<long, std::size_t>> all;
    for (std::size_t i = 0; i < n; ++i) {
      long dot = 0;
      for (const auto& [bucket, c] : buckets(docs[i].text)) {
        if (auto it = qb.find(bucket); it != qb.end()) dot += c * it->second;
      }
      all.emplace_back(-dot, i);
    }
    std::sort(all.begin(), all.end());
    const Corpus corpus(std::move(docs));
    const RetrievalResult got = retrieve(build_index(corpus, embedder), corpus, query, k, embedder);
    bool same = got.hits.size() == std::min(k, n);
    for (std::size_t i = 0; same && i < got.hits.size(); ++i) {
      same = got.hits[i].document.id == corpus[all[i].second].id &&
             got.hits[i].score == static_cast<float>(-all[i].first);
    }
    mismatches += same ? 0 : 1;
  }
  return {mismatches == 0, std::to_string(mismatches) + " mismatches over 200 instances"};
}

Check end_to_end() {
  const auto t0 = Clock::now();
  const auto& outcomes = clean_outcomes();
  const double secs = seconds_since(t0);
  const MetricsReport r = evaluate(outcomes, 0.5);
  const double gap = r.mean_member_accuracy - r.mean_non_member_accuracy;
  return {r.retrieval_recall >= kMinRecall && r.roc_auc >= kMinAuc && gap >= kMinAccuracyGap &&
              secs < kMaxEndToEndSeconds,
          "recall " + fmt(r.retrieval_recall) + ", AUC " + fmt(r.roc_auc) + ", accuracy " +
              fmt(r.mean_member_accuracy) + " vs " + fmt(r.mean_non_member_accuracy) + " (gap " +
              fmt(gap) + "), " + std::to_string(r.n_member) + "/" + std::to_string(r.n_non_member) +
              " docs, " + fmt(secs) + " s"};
}

Check threshold_boundary() {
  const Verdict five = decide(5, 10, 0.5);
  const Verdict six = decide(6, 10, 0.5);
  return {five == Verdict::kNonMember && six == Verdict::kMember,
          "5/10 -> " + std::string(to_string(five)) + ", 6/10 -> " + std::string(to_string(six))};
}

Check gamma_independence() {
  const auto& outcomes = clean_outcomes();
  const MetricsReport ref = evaluate(outcomes, 0.5);
  bool identical = true;
  std::set<double> f1s, accuracies;
  for (double g : parse_range("0.1:1.0:0.1")) {
    const MetricsReport r = evaluate(outcomes, g);
    identical = identical && r.roc_auc == ref.roc_auc && r.retrieval_recall == ref.retrieval_recall;
    f1s.insert(r.confusion.f1);
    accuracies.insert(r.confusion.accuracy);
  }
  return {identical && (f1s.size() > 1 || accuracies.size() > 1),
          std::string(identical ? "recall and AUC bit-identical" : "recall or AUC moved") +
              " across 10 gammas; " + std::to_string(f1s.size()) + " distinct F1 values"};
}

Check top_k_insensitivity() {
  const Setup& s = clean_setup();
  SweepSpec spec;
  spec.mask_counts = {10};
  spec.gammas = {0.5};
  spec.top_ks = {5, 10, 15, 20};
  const SweepResult r =
      sweep(spec, s.eval, s.rag(), ProxyLmMasker(s.backends.parts()), 10, workers());
  double lo = 1.0, hi = 0.0;
  std::string aucs;
  for (const SweepRow& row : r.rows) {
    if (!row.report) return {false, "K=" + std::to_string(row.top_k) + " failed: " + row.error};
    lo = std::min(lo, row.report->roc_auc);
    hi = std::max(hi, row.report->roc_auc);
    aucs += (aucs.empty() ? "" : ", ") + std::string("K=") + std::to_string(row.top_k) + " " +
            fmt(row.report->roc_auc);
  }
  return {hi - lo < kMaxTopKSpread, aucs + " (spread " + fmt(hi - lo) + ")"};
}

Check ablation_ordering() {
  const Setup s(inject_misspellings(synth_corpus(SynthSpec{}), kMisspellRate, kMisspellSeed));
  const RagSystem rag = s.rag();
  std::map<AblationStrategy, double> auc;
  for (auto strat : {AblationStrategy::kFull, AblationStrategy::kNoSpellCorrection,
                     AblationStrategy::kPlmOnly, AblationStrategy::kRandom}) {
    auc[strat] = ablation(strat, s.eval, AttackConfig{}, rag, s.backends.parts(), s.config.seed,
                          nullptr, workers())
                     .roc_auc;
  }
  const double full = auc[AblationStrategy::kFull];
  const double no_sc = auc[AblationStrategy::kNoSpellCorrection];
  const double plm = auc[AblationStrategy::kPlmOnly];
  const double rnd = auc[AblationStrategy::kRandom];
  return {full >= no_sc && no_sc >= plm && full > rnd,
          "full " + fmt(full) + ", no_spell_correction " + fmt(no_sc) + ", plm_only " + fmt(plm) +
              ", random " + fmt(rnd)};
}

Check defenses() {
  const Setup& s = clean_setup();
  const double plain = evaluate(clean_outcomes(), 0.5).roc_auc;
  DefenseConfig rerank;
  rerank.rerank_shuffle_seed = 99;
  const double shuffled = evaluate(s.attack(s.rag(rerank), AttackConfig{}), 0.5).roc_auc;
  DefenseConfig para;
  para.paraphrase = true;
  const double paraphrased = evaluate(s.attack(s.rag(para), AttackConfig{}), 0.5).roc_auc;
  const double shift = std::abs(shuffled - plain);
  return {shift < kMaxRerankShift && paraphrased < plain && paraphrased >= kMinParaphrasedAuc,
          "AUC " + fmt(plain) + ", rerank " + fmt(shuffled) + " (shift " + fmt(shift) +
              "), paraphrase " + fmt(paraphrased)};
}

// Serves fixed per-document logprobs, keyed by document text.
class TableLogprobs : public Generator {
 public:
  explicit TableLogprobs(std::map<std::string, std::vector<double>> table)
      : table_(std::move(table)) {}
  Generation generate(const ChatPrompt&) const override { return {}; }
  bool supports_logprobs() const override { return true; }
  std::vector<TokenLogprob> text_logprobs(std::string_view text) const override {
    std::vector<TokenLogprob> out;
    for (double v : table_.at(std::string(text))) out.push_back({"t", v});
    return out;
  }

 private:
  std::map<std::string, std::vector<double>> table_;
};

Check metric_oracles() {
  Rng rng(53);
  std::size_t auc_mismatch = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + uniform_index(rng, 80);
    std::vector<ScoredLabel> s(n);
    for (auto& v : s) v = {static_cast<double>(uniform_index(rng, 12)) / 11.0, bernoulli(rng, 0.5)};
    s[0].member = true;
    s[1].member = false;
    long twice = 0, pairs = 0;
    for (const auto& p : s) {
      for (const auto& q : s) {
        if (!p.member || q.member) continue;
        ++pairs;
        twice += p.score > q.score ? 2 : p.score == q.score ? 1 : 0;
      }
    }
    auc_mismatch += roc_auc(s) == static_cast<double>(twice) / (2.0 * pairs) ? 0 : 1;
  }

  std::size_t mink_mismatch = 0;
  std::map<std::string, std::vector<double>> table;
  std::vector<Document> docs;
  std::vector<double> expected;
  std::vector<int> ks;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + uniform_index(rng, 60);
    std::vector<double> lp(n);
    for (auto& v : lp) v = -static_cast<double>(uniform_index(rng, 4096)) / 256.0;
    const int k = 1 + static_cast<int>(uniform_index(rng, 100));
    const std::size_t count =
        std::max<std::size_t>(1, (static_cast<std::size_t>(k) * n + 99) / 100);
    std::vector<double> sorted = lp;
    std::sort(sorted.begin(), sorted.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < count; ++i) sum += sorted[i];
    const std::string key = "doc " + std::to_string(trial);
    table[key] = lp;
    docs.push_back({key, key});
    expected.push_back(sum / static_cast<double>(count));
    ks.push_back(k);
  }
  const TableLogprobs generator(table);
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const auto scores = min_k_prob(std::span(docs).subspan(i, 1), generator, ks[i]);
    mink_mismatch += scores[0].raw["min_k_mean"].get<double>() == expected[i] ? 0 : 1;
  }
  const std::vector<double> worked = {-1, -2, -3, -4};
  const double example = min_k_raw(worked, 50.0);
  return {auc_mismatch == 0 && mink_mismatch == 0 && example == -3.5,
          "AUC " + std::to_string(auc_mismatch) + "/1000 mismatches, min-k " +
              std::to_string(mink_mismatch) + "/1000 mismatches, worked example " + fmt(example)};
}

Check baseline_sanity() {
  const Setup& s = clean_setup();
  const double mba = evaluate(clean_outcomes(), 0.5).roc_auc;
  const RagSystem rag = s.rag();
  const std::vector<LabeledDocument> none;
  const double s2 =
      run_baseline(BaselineMethod::kS2miaS, s.eval, none, rag, 10, s.backends.embedder(), workers())
          .roc_auc;
  const double rm =
      run_baseline(BaselineMethod::kRagMia, s.eval, none, rag, 10, s.backends.embedder(), workers())
          .roc_auc;
  return {mba > s2 && mba > rm,
          "MBA " + fmt(mba) + ", s2mia_s " + fmt(s2) + ", rag_mia " + fmt(rm)};
}

}  // namespace
}  // namespace maskmia

int main() {
  using namespace maskmia;
  const std::vector<std::pair<const char*, std::function<Check()>>> criteria = {
      {"1  mask-generation invariants", mask_invariants},
      {"2  argmax matches exhaustive sweep", argmax_oracle},
      {"3  retrieval matches full sort", retrieval_oracle},
      {"4  end-to-end separation", end_to_end},
      {"5  threshold boundary", threshold_boundary},
      {"6  gamma independence", gamma_independence},
      {"7  top-K insensitivity", top_k_insensitivity},
      {"8  ablation ordering under misspellings", ablation_ordering},
      {"9  defense behaviour", defenses},
      {"10 metric oracles", metric_oracles},
      {"11 attack beats baselines", baseline_sanity},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Check c;
    try {
      c = run();
    } catch (const std::exception& e) {
      c = {false, std::string("threw: ") + e.what()};
    }
    failed += c.pass ? 0 : 1;
    std::printf("%s  criterion %s: %s\n", c.pass ? "PASS" : "FAIL", name, c.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
