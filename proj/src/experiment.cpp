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

#include "maskmia/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "maskmia/error.hpp"
#include "maskmia/parallel.hpp"

namespace maskmia {
namespace {

std::size_t effective_workers(std::size_t workers, const RagSystem& rag, bool masker_safe) {
  return rag.generator().concurrent_safe() && masker_safe ? workers : 1;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(10);
  s << v;
  return s.str();
}

std::vector<ScoredLabel> labeled_scores(std::span<const LabeledDocument> docs,
                                        std::span<const BaselineScore> scores) {
  std::vector<ScoredLabel> out;
  for (std::size_t i = 0; i < docs.size(); ++i) out.push_back({scores[i].logit, docs[i].member});
  return out;
}

}  // namespace

nlohmann::json to_json(const MetricsReport& r) {
  return {{"retrieval_recall", r.retrieval_recall},
          {"roc_auc", r.roc_auc},
          {"accuracy", r.confusion.accuracy},
          {"precision", r.confusion.precision},
          {"recall", r.confusion.recall},
          {"f1", r.confusion.f1},
          {"confusion", to_json(r.confusion)},
          {"n_member", r.n_member},
          {"n_non_member", r.n_non_member},
          {"n_inconclusive", r.n_inconclusive},
          {"n_rejected", r.n_rejected},
          {"mean_member_accuracy", r.mean_member_accuracy},
          {"mean_non_member_accuracy", r.mean_non_member_accuracy},
          {"mask_count", r.mask_count},
          {"top_k", r.top_k},
          {"gamma", r.gamma},
          {"config_echo", r.config_echo}};
}

MetricsReport evaluate(std::span<const LabeledOutcome> outcomes, double gamma) {
  MetricsReport r;
  r.gamma = gamma;
  std::vector<ScoredLabel> scores;
  std::vector<Prediction> predictions;
  std::vector<RetrievalFlag> flags;
  double member_sum = 0.0, non_member_sum = 0.0;
  for (const auto& lo : outcomes) {
    const AttackOutcome& o = lo.outcome;
    r.mask_count = o.mask_count;
    if (o.verdict == Verdict::kInconclusive) {
      ++r.n_inconclusive;
      r.n_rejected += o.note.starts_with("mask rejected") ? 1 : 0;
      continue;
    }
    (lo.member ? r.n_member : r.n_non_member)++;
    (lo.member ? member_sum : non_member_sum) += o.accuracy;
    scores.push_back({o.accuracy, lo.member});
    predictions.push_back(
        {decide(o.correct_count, o.mask_count, gamma) == Verdict::kMember, lo.member});
    flags.push_back({o.retrieved_target, lo.member});
  }
  r.roc_auc = roc_auc(scores);
  r.retrieval_recall = retrieval_recall(flags);
  r.confusion = confusion_metrics(predictions);
  r.mean_member_accuracy = member_sum / static_cast<double>(r.n_member);
  r.mean_non_member_accuracy = non_member_sum / static_cast<double>(r.n_non_member);
  return r;
}

std::vector<LabeledOutcome> run_attack(std::span<const LabeledDocument> docs,
                                       const AttackConfig& cfg, const RagSystem& rag,
                                       const MaskStrategy& masker, std::size_t workers) {
  cfg.validate();
  return parallel_map(
      docs,
      [&](const LabeledDocument& d) {
        return LabeledOutcome{infer_membership(d.document, cfg, rag, masker), d.member};
      },
      effective_workers(workers, rag, masker.concurrent_safe()));
}

void SweepSpec::validate() const {
  std::vector<std::string> bad;
  if (mask_counts.empty()) bad.push_back("sweep.mask_counts is empty");
  if (gammas.empty()) bad.push_back("sweep.gammas is empty");
  if (top_ks.empty()) bad.push_back("sweep.top_ks is empty");
  for (int m : mask_counts) {
    if (m < 1) bad.push_back("sweep.mask_counts contains " + std::to_string(m));
  }
  for (double g : gammas) {
    if (!(g > 0.0 && g <= 1.0)) bad.push_back("sweep.gammas contains " + fmt(g));
  }
  for (std::size_t k : top_ks) {
    if (k < 1) bad.push_back("sweep.top_ks contains 0");
  }
  if (bad.empty()) return;
  std::string msg = "invalid sweep spec:";
  for (const auto& b : bad) msg += "\n  " + b;
  throw ConfigError(msg);
}

std::vector<double> value_range(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi >= lo)) throw InvalidArgument("range needs lo <= hi and step > 0");
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 0.5)) + 1;
  std::vector<double> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(std::round((lo + static_cast<double>(i) * step) * 1e9) / 1e9);
  }
  return out;
}

std::vector<double> parse_range(std::string_view spec) {
  std::vector<double> parts;
  std::size_t pos = 0;
  while (pos <= spec.size()) {
    std::size_t colon = spec.find(':', pos);
    if (colon == std::string_view::npos) colon = spec.size();
    const std::string piece(spec.substr(pos, colon - pos));
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(piece, &used));
      if (used != piece.size()) throw std::invalid_argument(piece);
    } catch (const std::exception&) {
      throw InvalidArgument("bad range '" + std::string(spec) +
                            "' (expected lo:hi:step or a value)");
    }
    pos = colon + 1;
  }
  if (parts.size() == 1) return parts;
  if (parts.size() != 3) throw InvalidArgument("bad range '" + std::string(spec) + "'");
  return value_range(parts[0], parts[1], parts[2]);
}

SweepResult sweep(const SweepSpec& spec, std::span<const LabeledDocument> docs,
                  const RagSystem& rag, const MaskStrategy& masker, std::size_t reference_top_k,
                  std::size_t workers) {
  spec.validate();
  SweepResult result;
  result.reference_top_k = reference_top_k;
  const std::size_t w = effective_workers(workers, rag, masker.concurrent_safe());
  double best_auc = -1.0;
  for (int m : spec.mask_counts) {
    struct Masked {
      std::optional<MaskedDocument> doc;
      std::string note;
    };
    const auto masked = parallel_map(
        docs,
        [&](const LabeledDocument& d) {
          try {
            return Masked{masker.mask(d.document, m), {}};
          } catch (const InsufficientMaskableWords& e) {
            return Masked{std::nullopt, e.what()};
          } catch (const MaskRejected& e) {
            return Masked{std::nullopt, std::string("mask rejected: ") + e.what()};
          }
        },
        w);
    for (std::size_t k : spec.top_ks) {
      std::vector<LabeledOutcome> outcomes;
      std::string error;
      try {
        AttackConfig cfg{m, spec.gammas.front(), k};
        std::vector<std::size_t> index(docs.size());
        for (std::size_t i = 0; i < index.size(); ++i) index[i] = i;
        outcomes = parallel_map(
            std::span<const std::size_t>(index),
            [&](std::size_t i) {
              if (!masked[i].doc) {
                AttackOutcome o;
                o.source_id = docs[i].document.id;
                o.mask_count = m;
                o.note = masked[i].note;
                return LabeledOutcome{std::move(o), docs[i].member};
              }
              return LabeledOutcome{attack_masked(*masked[i].doc, cfg, rag), docs[i].member};
            },
            w);
      } catch (const std::exception& e) {
        error = e.what();
      }
      for (double g : spec.gammas) {
        SweepRow row{m, k, g, std::nullopt, error};
        if (error.empty()) {
          try {
            row.report = evaluate(outcomes, g);
            row.report->top_k = k;
          } catch (const std::exception& e) {
            row.error = e.what();
          }
        }
        if (row.report && k == reference_top_k && row.report->roc_auc > best_auc) {
          best_auc = row.report->roc_auc;
          result.best_mask_count = m;
        }
        result.rows.push_back(std::move(row));
      }
    }
  }
  double best_f1 = -1.0;
  for (const auto& row : result.rows) {
    if (row.report && row.mask_count == result.best_mask_count && row.top_k == reference_top_k &&
        row.report->confusion.f1 > best_f1) {
      best_f1 = row.report->confusion.f1;
      result.best_gamma = row.gamma;
    }
  }
  return result;
}

void write_sweep_csv(const SweepResult& result, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "M,K,gamma,retrieval_recall,roc_auc,accuracy,precision,recall,f1,n_member,"
         "n_non_member,n_inconclusive,error\n";
  for (const auto& row : result.rows) {
    out << row.mask_count << ',' << row.top_k << ',' << fmt(row.gamma) << ',';
    if (row.report) {
      const auto& r = *row.report;
      out << fmt(r.retrieval_recall) << ',' << fmt(r.roc_auc) << ',' << fmt(r.confusion.accuracy)
          << ',' << fmt(r.confusion.precision) << ',' << fmt(r.confusion.recall) << ','
          << fmt(r.confusion.f1) << ',' << r.n_member << ',' << r.n_non_member << ','
          << r.n_inconclusive << ',';
    } else {
      out << ",,,,,,,,,";
    }
    std::string err = row.error;
    std::replace(err.begin(), err.end(), '\n', ' ');
    std::replace(err.begin(), err.end(), ',', ';');
    out << err << '\n';
  }
}

void write_plot_series(const SweepResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto m_out = open_out(dir / "sweep_M.dat");
  auto g_out = open_out(dir / "sweep_gamma.dat");
  auto k_out = open_out(dir / "sweep_K.dat");
  m_out << "# M roc_auc retrieval_recall (K=" << result.reference_top_k << ")\n";
  g_out << "# gamma f1 accuracy (M=" << result.best_mask_count << ", K=" << result.reference_top_k
        << ")\n";
  k_out << "# K roc_auc retrieval_recall (M=" << result.best_mask_count << ")\n";
  std::map<int, const MetricsReport*> by_m;
  std::map<std::size_t, const MetricsReport*> by_k;
  for (const auto& row : result.rows) {
    if (!row.report) continue;
    const auto& r = *row.report;
    if (row.top_k == result.reference_top_k) by_m.emplace(row.mask_count, &r);
    if (row.mask_count == result.best_mask_count) by_k.emplace(row.top_k, &r);
    if (row.mask_count == result.best_mask_count && row.top_k == result.reference_top_k) {
      g_out << fmt(row.gamma) << ' ' << fmt(r.confusion.f1) << ' ' << fmt(r.confusion.accuracy)
            << '\n';
    }
  }
  for (const auto& [m, r] : by_m) {
    m_out << m << ' ' << fmt(r->roc_auc) << ' ' << fmt(r->retrieval_recall) << '\n';
  }
  for (const auto& [k, r] : by_k) {
    k_out << k << ' ' << fmt(r->roc_auc) << ' ' << fmt(r->retrieval_recall) << '\n';
  }
}

std::string_view to_string(AblationStrategy s) {
  switch (s) {
    case AblationStrategy::kRandom:
      return "random";
    case AblationStrategy::kLlmBased:
      return "llm_based";
    case AblationStrategy::kPlmOnly:
      return "plm_only";
    case AblationStrategy::kNoSpellCorrection:
      return "no_spell_correction";
    case AblationStrategy::kFull:
      break;
  }
  return "full";
}

AblationStrategy parse_ablation_strategy(std::string_view name) {
  std::string n(name);
  std::replace(n.begin(), n.end(), '-', '_');
  for (auto s : {AblationStrategy::kRandom, AblationStrategy::kLlmBased, AblationStrategy::kPlmOnly,
                 AblationStrategy::kNoSpellCorrection, AblationStrategy::kFull}) {
    if (n == to_string(s)) return s;
  }
  throw InvalidArgument("unknown ablation strategy '" + std::string(name) + "'");
}

std::unique_ptr<MaskStrategy> make_strategy(AblationStrategy s, const MaskerParts& parts,
                                            std::uint64_t seed, const Generator* llm) {
  switch (s) {
    case AblationStrategy::kRandom:
      return std::make_unique<RandomMasker>(seed, parts.stopwords);
    case AblationStrategy::kLlmBased:
      if (!llm) throw InvalidArgument("llm_based masking needs a generator");
      return std::make_unique<LlmMasker>(*llm);
    case AblationStrategy::kPlmOnly:
      return std::make_unique<ProxyLmMasker>(parts, MaskingOptions{false, false}, "plm_only");
    case AblationStrategy::kNoSpellCorrection:
      return std::make_unique<ProxyLmMasker>(parts, MaskingOptions{true, false},
                                             "no_spell_correction");
    case AblationStrategy::kFull:
      break;
  }
  return std::make_unique<ProxyLmMasker>(parts, MaskingOptions{}, "full");
}

MetricsReport ablation(AblationStrategy s, std::span<const LabeledDocument> docs,
                       const AttackConfig& cfg, const RagSystem& rag, const MaskerParts& parts,
                       std::uint64_t seed, const Generator* llm, std::size_t workers) {
  const auto masker = make_strategy(s, parts, seed, llm);
  const auto outcomes = run_attack(docs, cfg, rag, *masker, workers);
  MetricsReport r = evaluate(outcomes, cfg.gamma);
  r.top_k = cfg.top_k;
  r.config_echo["strategy"] = to_string(s);
  return r;
}

BaselineRun run_baseline(BaselineMethod method, std::span<const LabeledDocument> test,
                         std::span<const LabeledDocument> train, const RagSystem& rag,
                         std::size_t k, const Embedder& embedder, std::size_t workers) {
  const std::size_t w = rag.generator().concurrent_safe() ? workers : 1;
  BaselineRun run;
  switch (method) {
    case BaselineMethod::kRagMia:
      run.scores = parallel_map(
          test, [&](const LabeledDocument& d) { return rag_mia(d.document, rag, k); }, w);
      break;
    case BaselineMethod::kS2miaS: {
      run.scores = parallel_map(
          test,
          [&](const LabeledDocument& d) {
            return s2mia_s_score(s2mia_observe(d.document, rag, k, embedder, false));
          },
          w);
      break;
    }
    case BaselineMethod::kS2miaSp: {
      auto observe = [&](const LabeledDocument& d) {
        return s2mia_observe(d.document, rag, k, embedder, true);
      };
      const auto train_obs = parallel_map(train, observe, w);
      const auto labels = std::make_unique<bool[]>(train.size());
      for (std::size_t i = 0; i < train.size(); ++i) labels[i] = train[i].member;
      const auto clf =
          ThresholdClassifier::fit(train_obs, std::span<const bool>(labels.get(), train.size()));
      for (const auto& obs : parallel_map(test, observe, w)) {
        run.scores.push_back(s2mia_sp_score(obs, clf));
      }
      run.details = {{"sim_threshold", clf.sim_threshold()},
                     {"ppl_threshold", clf.ppl_threshold()},
                     {"train_f1", clf.train_f1()}};
      break;
    }
    case BaselineMethod::kMinK: {
      if (!rag.generator().supports_logprobs())
        throw CapabilityError("min-k requires token logprobs");
      std::vector<Document> docs;
      for (const auto& d : test) docs.push_back(d.document);
      const auto logprobs = parallel_map(
          std::span<const Document>(docs),
          [&](const Document& d) {
            std::vector<double> lp;
            for (const auto& t : rag.generator().text_logprobs(d.text)) lp.push_back(t.logprob);
            return lp;
          },
          w);
      double best = -1.0;
      nlohmann::json per_k = nlohmann::json::object();
      for (int kp = 1; kp <= 20; ++kp) {
        auto scores = min_k_from_logprobs(docs, logprobs, kp);
        const double auc = roc_auc(labeled_scores(test, scores));
        per_k[std::to_string(kp)] = auc;
        if (auc > best) {
          best = auc;
          run.scores = std::move(scores);
          run.details["best_k_percent"] = kp;
        }
      }
      run.details["auc_per_k_percent"] = per_k;
      break;
    }
  }
  run.roc_auc = roc_auc(labeled_scores(test, run.scores));
  return run;
}

}  // namespace maskmia
