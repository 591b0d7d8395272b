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

// Command-line driver. Every run-producing subcommand writes into one output
// directory: config.json (the effective configuration, reusable with
// --config), split.json, the subcommand's artifacts, and manifest.json last.
//
// Precedence: built-in defaults < --config file < command-line flags.
// Exit status: 0 success, 2 usage or configuration, 3 input data,
// 4 backend, 1 anything else. Failures print one JSON object to stderr.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "maskmia/config.hpp"
#include "maskmia/error.hpp"
#include "maskmia/random.hpp"
#include "maskmia/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace maskmia {
namespace {

struct Overrides {
  std::optional<std::string> config;
  std::optional<std::string> corpus;
  std::optional<std::string> output_dir;
  std::optional<int> mask_count;
  std::optional<double> gamma;
  std::optional<std::size_t> top_k;
  std::optional<double> member_fraction;
  std::optional<std::uint64_t> split_seed;
  std::optional<std::size_t> train_count;
  std::optional<std::size_t> test_count;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::optional<std::string> generator;
  std::optional<std::string> remote_config;
};

void add_common(CLI::App* cmd, Overrides& o, bool with_gamma = true) {
  cmd->add_option("--config", o.config, "JSON run configuration");
  cmd->add_option("--corpus", o.corpus, "JSONL corpus (id, text)");
  cmd->add_option("--out,-o", o.output_dir, "output directory");
  cmd->add_option("--mask-count,-M", o.mask_count, "masks per document");
  if (with_gamma) cmd->add_option("--gamma", o.gamma, "membership threshold fraction");
  cmd->add_option("--top-k,-K", o.top_k, "retrieved documents per query");
  cmd->add_option("--member-fraction", o.member_fraction, "share of the corpus indexed");
  cmd->add_option("--split-seed", o.split_seed, "seed of the member split");
  cmd->add_option("--train-per-class", o.train_count, "balanced train sample size per class");
  cmd->add_option("--test-per-class", o.test_count,
                  "balanced test sample size per class; 0 evaluates every document");
  cmd->add_option("--seed", o.seed, "seed of random masking");
  cmd->add_option("--workers,-j", o.workers, "worker threads");
  cmd->add_option("--generator", o.generator, "oracle or remote");
  cmd->add_option("--remote-config", o.remote_config,
                  "JSON file {base_url, model, api_key_env, logprobs, max_in_flight}");
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + " is not valid JSON: " + e.what());
  }
}

RunConfig resolve(const Overrides& o) {
  RunConfig c = o.config ? RunConfig::load(*o.config) : RunConfig{};
  if (o.corpus) c.corpus = *o.corpus;
  if (o.output_dir) c.output_dir = *o.output_dir;
  if (o.mask_count) c.attack.mask_count = *o.mask_count;
  if (o.gamma) c.attack.gamma = *o.gamma;
  if (o.top_k) c.attack.top_k = *o.top_k;
  if (o.member_fraction) c.split.member_fraction = *o.member_fraction;
  if (o.split_seed) c.split.seed = *o.split_seed;
  if (o.train_count) c.split.train_count_per_class = *o.train_count;
  if (o.test_count) c.split.test_count_per_class = *o.test_count;
  if (o.seed) c.seed = *o.seed;
  if (o.workers) c.workers = *o.workers;
  if (o.generator) c.generator.type = *o.generator;
  if (o.remote_config)
    c.generator.remote = RemoteConfig::from_json(read_json_file(*o.remote_config));
  c.validate();
  if (c.corpus.empty())
    throw ConfigError("invalid configuration:\n  corpus is required (--corpus or config)");
  return c;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// Writes files under the run directory and records them for the manifest.
class RunDirectory {
 public:
  RunDirectory(fs::path root, std::string command)
      : root_(std::move(root)), command_(std::move(command)) {
    fs::create_directories(root_);
  }

  void write(const std::string& name, const std::string& bytes) {
    const fs::path path = root_ / name;
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << bytes;
    if (!out) throw IoError("short write to " + path.string());
    artifacts_.push_back({{"file", name}, {"bytes", bytes.size()}, {"fnv1a", hex64(fnv1a(bytes))}});
  }
  void write_json(const std::string& name, const json& j) { write(name, j.dump(2) + "\n"); }
  void write_lines(const std::string& name, const std::vector<json>& records) {
    std::string bytes;
    for (const json& r : records) bytes += r.dump() + "\n";
    write(name, bytes);
  }
  // Records a file some other routine already wrote.
  void adopt(const std::string& name) {
    std::ifstream in(root_ / name, std::ios::binary);
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    artifacts_.push_back({{"file", name}, {"bytes", bytes.size()}, {"fnv1a", hex64(fnv1a(bytes))}});
  }
  const fs::path& root() const { return root_; }

  void finish(const json& extra) {
    json manifest = {{"command", command_}, {"artifacts", artifacts_}};
    manifest["resources"] = resource_fingerprints();
    for (const auto& [k, v] : extra.items()) manifest[k] = v;
    std::ofstream out(root_ / "manifest.json");
    out << manifest.dump(2) << "\n";
    if (!out) throw IoError("cannot write manifest");
  }

 private:
  fs::path root_;
  std::string command_;
  json artifacts_ = json::array();
};

// Shared state of every corpus-driven subcommand.
struct Session {
  RunConfig config;
  Corpus corpus;
  MemberSplit split;
  std::vector<LabeledDocument> eval;
  RunDirectory dir;

  Session(RunConfig cfg, const std::string& command)
      : config(std::move(cfg)),
        corpus(load_corpus(config.corpus)),
        split(split_members(corpus, config.split)),
        eval(evaluation_documents(split, config.split)),
        dir(config.output_dir, command) {
    dir.write_json("config.json", config.to_json());
    dir.write_json("split.json", split_manifest(split, config.split.seed));
  }

  json echo(const std::string& command, json extra = json::object()) const {
    json e = {
        {"command", command}, {"run", config.to_json()}, {"resources", resource_fingerprints()}};
    for (const auto& [k, v] : extra.items()) e[k] = v;
    return e;
  }
};

std::vector<json> outcome_records(const std::vector<LabeledOutcome>& outcomes) {
  std::vector<json> lines;
  for (const auto& o : outcomes) {
    json j = to_json(o.outcome);
    j["label"] = o.member ? "member" : "non_member";
    lines.push_back(std::move(j));
  }
  return lines;
}

json summary(const MetricsReport& r) {
  return {{"roc_auc", r.roc_auc}, {"retrieval_recall", r.retrieval_recall}, {"f1", r.confusion.f1}};
}

void run_attack_like(Session& s, const std::string& command, const MaskStrategy& masker,
                     const RagSystem& rag, json extra) {
  const auto outcomes = run_attack(s.eval, s.config.attack, rag, masker, s.config.workers);
  MetricsReport report = evaluate(outcomes, s.config.attack.gamma);
  report.top_k = s.config.attack.top_k;
  report.config_echo = s.echo(command, extra);
  s.dir.write_lines("outcomes.jsonl", outcome_records(outcomes));
  s.dir.write_json("report.json", to_json(report));
  s.dir.finish({{"summary", summary(report)}});
}

int cmd_synth(std::size_t documents, std::uint64_t seed, double follow_up, double misspell_rate,
              std::uint64_t misspell_seed, const std::string& out) {
  SynthSpec spec;
  spec.documents = documents;
  spec.seed = seed;
  spec.follow_up_rate = follow_up;
  Corpus corpus = synth_corpus(spec);
  if (misspell_rate > 0.0) corpus = inject_misspellings(corpus, misspell_rate, misspell_seed);
  const fs::path path(out);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  save_corpus(corpus, path);
  std::cout << json{{"status", "ok"}, {"documents", corpus.size()}, {"path", out}}.dump() << "\n";
  return 0;
}

void print_ok(const Session& s) {
  std::cout << json{{"status", "ok"}, {"output_dir", s.dir.root().string()}}.dump() << "\n";
}

int kind_exit_code(const std::exception& e, std::string& kind) {
  if (dynamic_cast<const ConfigError*>(&e)) return kind = "config_error", 2;
  if (dynamic_cast<const CapabilityError*>(&e)) return kind = "capability_error", 4;
  if (dynamic_cast<const BackendError*>(&e)) return kind = "backend_error", 4;
  if (dynamic_cast<const IoError*>(&e)) return kind = "io_error", 3;
  if (dynamic_cast<const ParseError*>(&e)) return kind = "parse_error", 3;
  if (dynamic_cast<const InvalidArgument*>(&e)) return kind = "invalid_argument", 3;
  if (dynamic_cast<const InsufficientMaskableWords*>(&e)) return kind = "insufficient_words", 3;
  if (dynamic_cast<const MaskRejected*>(&e)) return kind = "mask_rejected", 3;
  if (dynamic_cast<const fs::filesystem_error*>(&e)) return kind = "io_error", 3;
  return kind = "internal_error", 1;
}

int report_error(const std::string& kind, const std::string& message, int code) {
  std::cerr << json{{"error", {{"kind", kind}, {"message", message}}}}.dump() << "\n";
  return code;
}

int run(int argc, char** argv) {
  CLI::App app{"Mask-based membership inference against retrieval-augmented generation"};
  app.require_subcommand(1);
  Overrides o;

  auto* synth = app.add_subcommand("synth", "write a synthetic corpus");
  std::size_t synth_docs = 200;
  std::uint64_t synth_seed = 7;
  double synth_follow = 0.1, synth_misspell = 0.0;
  std::uint64_t synth_misspell_seed = 11;
  std::string synth_out;
  synth->add_option("--documents,-n", synth_docs, "document count");
  synth->add_option("--seed", synth_seed, "generator seed");
  synth->add_option("--follow-up-rate", synth_follow, "share of follow-up documents");
  synth->add_option("--misspell-rate", synth_misspell, "share of eligible words misspelled");
  synth->add_option("--misspell-seed", synth_misspell_seed, "misspelling seed");
  synth->add_option("--out,-o", synth_out, "output JSONL")->required();

  auto* split = app.add_subcommand("split", "member/non-member manifests");
  auto* index = app.add_subcommand("index", "build the knowledge base");
  auto* mask = app.add_subcommand("mask", "emit masked documents");
  auto* attack = app.add_subcommand("attack", "mask-based attack over the evaluation set");
  auto* baseline = app.add_subcommand("baseline", "reference attack");
  auto* ablate = app.add_subcommand("ablate", "attack with an alternative masking strategy");
  auto* sweep_cmd = app.add_subcommand("sweep", "grid over M, gamma and K");
  auto* defend = app.add_subcommand("defend", "attack against a defended system");
  for (auto* cmd : {split, index, mask, attack, baseline, ablate, defend}) add_common(cmd, o);
  add_common(sweep_cmd, o, /*with_gamma=*/false);

  std::string method;
  baseline->add_option("--method", method, "rag-mia, s2mia-s, s2mia-sp or min-k")->required();
  std::string strategy;
  ablate
      ->add_option("--strategy", strategy,
                   "random, llm-based, plm-only, no-spell-correction or full")
      ->required();
  std::optional<std::string> gamma_range, m_range, k_range;
  sweep_cmd->add_option("--gamma", gamma_range, "lo:hi:step or a value");
  sweep_cmd->add_option("--mask-counts", m_range, "lo:hi:step or a value");
  sweep_cmd->add_option("--top-ks", k_range, "lo:hi:step or a value");
  bool prompt_mod = false, paraphrase = false;
  std::optional<std::uint64_t> rerank_seed;
  defend->add_flag("--prompt-mod", prompt_mod, "append the no-repeat instruction");
  defend->add_option("--rerank-seed", rerank_seed, "shuffle retrieved context with this seed");
  defend->add_flag("--paraphrase", paraphrase, "paraphrase the knowledge base before indexing");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);  // --help and friends
  } catch (const CLI::ParseError& e) {
    return report_error("usage_error", e.what(), 2);
  }

  if (synth->parsed()) {
    return cmd_synth(synth_docs, synth_seed, synth_follow, synth_misspell, synth_misspell_seed,
                     synth_out);
  }
  if (split->parsed()) {
    Session s(resolve(o), "split");
    std::vector<json> members, non_members;
    for (const Document& d : s.split.members) members.push_back({{"id", d.id}, {"text", d.text}});
    for (const Document& d : s.split.non_members)
      non_members.push_back({{"id", d.id}, {"text", d.text}});
    s.dir.write_lines("members.jsonl", members);
    s.dir.write_lines("non_members.jsonl", non_members);
    s.dir.finish({});
    print_ok(s);
    return 0;
  }

  RunConfig cfg = resolve(o);
  if (sweep_cmd->parsed() && (gamma_range || m_range || k_range)) {
    // Axes not named on the command line stay at the attack setting.
    cfg.sweep.gammas =
        gamma_range ? parse_range(*gamma_range) : std::vector<double>{cfg.attack.gamma};
    cfg.sweep.mask_counts.clear();
    if (m_range) {
      for (double v : parse_range(*m_range))
        cfg.sweep.mask_counts.push_back(static_cast<int>(std::lround(v)));
    } else {
      cfg.sweep.mask_counts = {cfg.attack.mask_count};
    }
    cfg.sweep.top_ks.clear();
    if (k_range) {
      for (double v : parse_range(*k_range))
        cfg.sweep.top_ks.push_back(static_cast<std::size_t>(std::lround(v)));
    } else {
      cfg.sweep.top_ks = {cfg.attack.top_k};
    }
    cfg.validate();
  }
  if (defend->parsed()) {
    if (prompt_mod) cfg.defense.prompt_modification = true;
    if (paraphrase) cfg.defense.paraphrase = true;
    if (rerank_seed) cfg.defense.rerank_shuffle_seed = *rerank_seed;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  Backends backends(cfg);
  Session s(cfg, command);
  const RagSystem rag(s.split.members, backends.embedder(), backends.generator(), s.config.defense);
  const ProxyLmMasker masker(backends.parts());

  if (index->parsed()) {
    std::vector<json> knowledge;
    for (const Document& d : rag.knowledge()) knowledge.push_back({{"id", d.id}, {"text", d.text}});
    s.dir.write_lines("knowledge.jsonl", knowledge);
    json info = {{"documents", rag.index().size()},
                 {"dimension", rag.index().dimension()},
                 {"ids", rag.index().ids()},
                 {"config_echo", s.echo(command)}};
    s.dir.write_json("index.json", info);
    s.dir.finish({});
  } else if (mask->parsed()) {
    std::vector<json> lines;
    for (const LabeledDocument& d : s.eval) {
      try {
        lines.push_back(to_json(masker.mask(d.document, s.config.attack.mask_count)));
      } catch (const InsufficientMaskableWords& e) {
        lines.push_back({{"source_id", d.document.id}, {"error", e.what()}});
      }
    }
    s.dir.write_lines("masks.jsonl", lines);
    s.dir.finish({});
  } else if (attack->parsed() || defend->parsed()) {
    run_attack_like(s, command, masker, rag, json::object());
  } else if (ablate->parsed()) {
    const AblationStrategy which = parse_ablation_strategy(strategy);
    const auto strat = make_strategy(which, backends.parts(), s.config.seed, &backends.generator());
    run_attack_like(s, command, *strat, rag, {{"strategy", to_string(which)}});
  } else if (baseline->parsed()) {
    const BaselineMethod which = parse_baseline_method(method);
    const auto train = training_documents(s.split, s.config.split);
    if (which == BaselineMethod::kS2miaSp && train.empty()) {
      throw ConfigError(
          "invalid configuration:\n  split.train_count_per_class must be > 0 for s2mia_sp");
    }
    const BaselineRun result = run_baseline(which, s.eval, train, rag, s.config.attack.top_k,
                                            backends.embedder(), s.config.workers);
    std::vector<json> lines;
    for (std::size_t i = 0; i < result.scores.size(); ++i) {
      json j = to_json(result.scores[i]);
      j["label"] = s.eval[i].member ? "member" : "non_member";
      lines.push_back(std::move(j));
    }
    s.dir.write_lines("scores.jsonl", lines);
    s.dir.write_json("report.json",
                     {{"method", to_string(which)},
                      {"roc_auc", result.roc_auc},
                      {"details", result.details},
                      {"config_echo", s.echo(command, {{"method", to_string(which)}})}});
    s.dir.finish({{"summary", {{"roc_auc", result.roc_auc}}}});
  } else if (sweep_cmd->parsed()) {
    const SweepResult result =
        sweep(s.config.sweep, s.eval, rag, masker, s.config.attack.top_k, s.config.workers);
    write_sweep_csv(result, s.dir.root() / "sweep.csv");
    s.dir.adopt("sweep.csv");
    write_plot_series(result, s.dir.root() / "plots");
    for (const char* f : {"plots/sweep_M.dat", "plots/sweep_gamma.dat", "plots/sweep_K.dat"})
      s.dir.adopt(f);
    json rows = json::array();
    // The operating point: accuracy and F1 are quoted at the best gamma.
    json best = nullptr;
    for (const SweepRow& r : result.rows) {
      if (r.report && r.mask_count == result.best_mask_count && r.top_k == result.reference_top_k &&
          r.gamma == result.best_gamma) {
        best = to_json(*r.report);
        best.erase("config_echo");
        best["operating_point"] = "swept-best gamma";
      }
    }
    for (const SweepRow& r : result.rows) {
      json row = {{"M", r.mask_count}, {"K", r.top_k}, {"gamma", r.gamma}};
      if (r.report) {
        row["report"] = to_json(*r.report);
        row["report"].erase("config_echo");
      } else {
        row["error"] = r.error;
      }
      rows.push_back(std::move(row));
    }
    s.dir.write_json("report.json", {{"best_mask_count", result.best_mask_count},
                                     {"best_gamma", result.best_gamma},
                                     {"reference_top_k", result.reference_top_k},
                                     {"best", best},
                                     {"rows", rows},
                                     {"config_echo", s.echo(command)}});
    s.dir.finish({});
  }
  print_ok(s);
  return 0;
}

}  // namespace
}  // namespace maskmia

int main(int argc, char** argv) {
  try {
    return maskmia::run(argc, argv);
  } catch (const std::exception& e) {
    std::string kind;
    const int code = maskmia::kind_exit_code(e, kind);
    return maskmia::report_error(kind, e.what(), code);
  }
}
