#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "fairmtl/augment.hpp"
#include "fairmtl/config.hpp"
#include "fairmtl/jsonl.hpp"
#include "fairmtl/model.hpp"
#include "fairmtl/report.hpp"
#include "fairmtl/split.hpp"
#include "fairmtl/synth.hpp"
#include "fairmtl/trainer.hpp"

namespace fairmtl {

struct CommandOptions {
  Config config;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;   // --seed beats the config file
  std::optional<std::string> mode;     // --mode, train-bias only
  std::optional<std::string> regime;   // --regime, train-dialect only
  bool overwrite_dialect = false;      // --overwrite-dialect, augment only
};

namespace detail {

inline std::uint64_t seed_of(const CommandOptions& opts) {
  return opts.seed ? *opts.seed : opts.config.get_u64("seed", 1);
}

inline void ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory: " + dir);
}

inline void require_input_file(const std::string& path) {
  if (!std::filesystem::exists(path)) {
    throw ConfigError("input file not found: " + path);
  }
}

inline NgramConfig ngrams_from_config(const Config& cfg) {
  NgramConfig ng;
  ng.dim = static_cast<std::uint32_t>(cfg.get_u64("dim", ng.dim));
  if (ng.dim == 0) throw ConfigError("config key \"dim\": must be positive");
  ng.word_unigrams = cfg.get_bool("word_unigrams", ng.word_unigrams);
  ng.word_bigrams = cfg.get_bool("word_bigrams", ng.word_bigrams);
  ng.char_min = static_cast<std::uint32_t>(cfg.get_u64("char_min", ng.char_min));
  ng.char_max = static_cast<std::uint32_t>(cfg.get_u64("char_max", ng.char_max));
  return ng;
}

inline TrainConfig train_config_from(const Config& cfg, std::uint64_t seed) {
  TrainConfig tc;
  tc.batch_size = static_cast<std::uint32_t>(cfg.get_u64("batch_size", 16));
  tc.epochs = static_cast<std::uint32_t>(cfg.get_u64("epochs", 3));
  tc.steps = cfg.get_u64("steps", 0);
  tc.lr = cfg.get_double("learning_rate", 0.5);
  tc.seed = seed;
  if (tc.batch_size == 0) throw ConfigError("config key \"batch_size\": must be positive");
  if (tc.lr <= 0.0) throw ConfigError("config key \"learning_rate\": must be positive");
  return tc;
}

inline GenSpec gen_spec_from_config(const Config& cfg, std::uint64_t seed) {
  GenSpec spec = default_gen_spec();
  spec.seed = seed;
  spec.n_docs = cfg.get_u64("n_docs", 5000);
  spec.dialect_rate = cfg.get_double("dialect_rate", 0.5);
  spec.confound = cfg.get_double("confound", 0.0);
  spec.min_len = static_cast<std::uint32_t>(cfg.get_u64("min_len", spec.min_len));
  spec.max_len = static_cast<std::uint32_t>(cfg.get_u64("max_len", spec.max_len));
  spec.markers_per_doc =
      static_cast<std::uint32_t>(cfg.get_u64("markers_per_doc", spec.markers_per_doc));
  spec.cues_per_doc =
      static_cast<std::uint32_t>(cfg.get_u64("cues_per_doc", spec.cues_per_doc));
  for (AspectId a : kBiasAspects) {
    const std::string name(aspect_name(a));
    if (cfg.has("label_prior_" + name)) {
      spec.label_priors[a] = cfg.get_double("label_prior_" + name, 0.3);
    }
    if (cfg.has("confound_" + name)) {
      spec.confound_override[a] = cfg.get_double("confound_" + name, 0.0);
    }
  }
  return spec;
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << text;
  if (!out) throw std::runtime_error("short write: " + path);
}

inline void write_trace(const std::string& path, const TrainStats& stats) {
  std::string csv = "step,task,loss\n";
  for (std::size_t i = 0; i < stats.trace.size(); ++i) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%zu,%s,%.17g\n", i,
                  aspect_name(stats.trace[i].task).data(), stats.trace[i].loss);
    csv += buf;
  }
  write_text(path, csv);
}

// Nine-cell table in the style of the dialect-classifier results: rows
// Pos/Neg/Mac, columns P/R/F1.
inline void print_prf_table(const ConfusionCounts& c) {
  const Prf pos = prf(c);
  const Prf neg = prf_negative(c);
  std::printf("        P      R      F1\n");
  std::printf("  Pos %.3f  %.3f  %.3f\n", pos.precision, pos.recall, pos.f1);
  std::printf("  Neg %.3f  %.3f  %.3f\n", neg.precision, neg.recall, neg.f1);
  std::printf("  Mac %.3f  %.3f  %.3f\n", (pos.precision + neg.precision) / 2.0,
              (pos.recall + neg.recall) / 2.0, (pos.f1 + neg.f1) / 2.0);
}

struct FeaturizedPool {
  std::vector<FeatureVector> features;      // one per document
  std::vector<TaskPool> pools;              // round-robin order
};

// Builds per-task example pools over a shared featurized corpus. A document
// joins a task's pool iff it carries that task's label. With weighted loss,
// per-class weights are inverse-frequency within the pool.
inline FeaturizedPool build_pools(const std::vector<Document>& docs,
                                  const std::vector<AspectId>& tasks,
                                  const NgramConfig& ngrams, bool weighted) {
  FeaturizedPool out;
  out.features.reserve(docs.size());
  for (const Document& d : docs) out.features.push_back(featurize(d.clean_text, ngrams));
  for (AspectId task : tasks) {
    TaskPool pool;
    pool.task = task;
    std::uint64_t n0 = 0, n1 = 0;
    for (std::size_t i = 0; i < docs.size(); ++i) {
      const auto label = docs[i].label(task);
      if (!label) continue;
      pool.examples.push_back({i, *label, 1.0});
      (*label == 1 ? n1 : n0)++;
    }
    if (pool.examples.empty()) {
      throw ConfigError("corpus has no labels for task \"" +
                        std::string(aspect_name(task)) + "\"");
    }
    if (weighted) {
      const auto w = class_weights_from_counts(n0, n1);
      for (TrainExample& ex : pool.examples) {
        ex.weight = w[static_cast<std::size_t>(ex.label)];
      }
    }
    out.pools.push_back(std::move(pool));
  }
  return out;
}

inline ConfusionCounts score_task(const MultitaskModel& model,
                                  const std::vector<Document>& docs, AspectId task) {
  std::vector<int> preds, golds;
  for (const Document& d : docs) {
    const auto gold = d.label(task);
    if (!gold) continue;
    golds.push_back(*gold);
    preds.push_back(forward(model, featurize(d.clean_text, model.ngrams), task).label);
  }
  if (preds.empty()) {
    throw std::runtime_error("no test documents carry the label \"" +
                             std::string(aspect_name(task)) + "\"");
  }
  return confusion(preds, golds);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// generate: two synthetic corpora. The dialect corpus keeps its gold dialect
// flags (the dialect classifier's training data); the bias corpus has them
// stripped so the augment step has real work to do.

inline void cmd_generate(const CommandOptions& opts) {
  const std::uint64_t seed = detail::seed_of(opts);
  detail::ensure_out_dir(opts.out_dir);

  GenSpec spec = detail::gen_spec_from_config(opts.config, seed);
  const std::vector<Document> dialect_corpus = generate(spec);
  const std::string dialect_path = opts.out_dir + "/dialect_corpus.jsonl";
  write_jsonl(dialect_corpus, dialect_path);

  GenSpec bias_spec = spec;
  bias_spec.n_docs = opts.config.get_u64("n_docs_bias", spec.n_docs);
  bias_spec.seed = SplitMix64(seed).derive(0xB1A5).next_u64();
  std::vector<Document> bias_corpus = generate(bias_spec);
  std::uint64_t dialect_flagged = 0;
  for (Document& d : bias_corpus) {
    dialect_flagged += static_cast<std::uint64_t>(d.labels.at(AspectId::kDialect));
    d.labels.erase(AspectId::kDialect);
    d.dialect_source.reset();
  }
  const std::string bias_path = opts.out_dir + "/bias_corpus.jsonl";
  write_jsonl(bias_corpus, bias_path);

  std::printf("wrote %zu docs to %s\n", dialect_corpus.size(), dialect_path.c_str());
  std::printf("wrote %zu docs to %s (dialect flags stripped; %llu were flagged)\n",
              bias_corpus.size(), bias_path.c_str(),
              static_cast<unsigned long long>(dialect_flagged));
}

// ---------------------------------------------------------------------------
// train-dialect: the auxiliary-task classifier, with the two imbalance
// regimes: loss weighting (weighted) or majority-class subsampling
// (subsampled).

inline void cmd_train_dialect(const CommandOptions& opts) {
  const Config& cfg = opts.config;
  const std::uint64_t seed = detail::seed_of(opts);
  const std::string regime = opts.regime ? *opts.regime : cfg.get_string("regime", "weighted");
  if (regime != "weighted" && regime != "subsampled") {
    throw ConfigError("regime must be \"weighted\" or \"subsampled\", got \"" + regime + "\"");
  }
  const std::string corpus_path =
      cfg.get_string("corpus", opts.out_dir + "/dialect_corpus.jsonl");
  detail::require_input_file(corpus_path);
  detail::ensure_out_dir(opts.out_dir);

  const std::vector<Document> docs = load_jsonl(corpus_path);
  for (const Document& d : docs) {
    if (!d.has_label(AspectId::kDialect)) {
      throw ConfigError("document \"" + d.id + "\" has no dialect label; " +
                        "train-dialect needs gold dialect flags");
    }
  }

  const DatasetSplit split =
      stratified_split(docs, AspectId::kDialect, cfg.get_double("train_frac", 0.8),
                       cfg.get_double("val_frac", 0.0), seed);

  std::vector<Document> train_docs = split.train;
  bool weighted = regime == "weighted";
  if (regime == "subsampled") {
    train_docs = subsample_balanced(train_docs, AspectId::kDialect,
                                    SplitMix64(seed).derive(0x5B5).next_u64());
  }

  const NgramConfig ngrams = detail::ngrams_from_config(cfg);
  detail::FeaturizedPool data =
      detail::build_pools(train_docs, {AspectId::kDialect}, ngrams, weighted);

  const std::uint32_t hidden = static_cast<std::uint32_t>(cfg.get_u64("hidden", 32));
  MultitaskModel model = init_model(ngrams, hidden, {AspectId::kDialect}, seed);
  model.model_id = "dialect-" + regime + "-s" + std::to_string(seed);
  model.metadata["kind"] = "dialect";
  model.metadata["regime"] = regime;
  model.metadata["seed"] = std::to_string(seed);
  model.metadata["config_hash"] = cfg.hash();

  const TrainStats stats =
      train(model, data.features, data.pools, detail::train_config_from(cfg, seed));
  detail::write_trace(opts.out_dir + "/dialect_train_trace.csv", stats);
  detail::write_text(opts.out_dir + "/dialect_split.json",
                     split_manifest(split).dump(2) + "\n");

  const std::string model_path =
      cfg.get_string("model_out", opts.out_dir + "/dialect_model.bin");
  save_model(model, model_path);

  std::printf("dialect classifier (%s), %zu train docs, %llu steps\n", regime.c_str(),
              train_docs.size(), static_cast<unsigned long long>(stats.total_steps));
  std::printf("test split results (dialect head):\n");
  detail::print_prf_table(detail::score_task(model, split.test, AspectId::kDialect));
  std::printf("model written to %s\n", model_path.c_str());
}

// ---------------------------------------------------------------------------
// augment: fill missing dialect labels with the dialect model's predictions.

inline void cmd_augment(const CommandOptions& opts) {
  const Config& cfg = opts.config;
  const std::string corpus_path =
      cfg.get_string("corpus", opts.out_dir + "/bias_corpus.jsonl");
  const std::string model_path =
      cfg.get_string("model", opts.out_dir + "/dialect_model.bin");
  detail::require_input_file(corpus_path);
  detail::require_input_file(model_path);
  detail::ensure_out_dir(opts.out_dir);

  const std::vector<Document> docs = load_jsonl(corpus_path);
  const MultitaskModel model = load_model(model_path);
  const std::vector<Document> augmented = augment(docs, model, opts.overwrite_dialect);

  std::uint64_t added = 0;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (augmented[i].dialect_source && !docs[i].dialect_source) ++added;
  }
  const std::string out_path =
      cfg.get_string("augmented_out", opts.out_dir + "/augmented_corpus.jsonl");
  write_jsonl(augmented, out_path);
  std::printf("augmented %llu of %zu docs with model dialect labels -> %s\n",
              static_cast<unsigned long long>(added), docs.size(), out_path.c_str());
}

// ---------------------------------------------------------------------------
// train-bias: the ablation grid. Mode picks the task set; the stratification
// label and the singletask target come from the `aspect` config key.

inline std::vector<AspectId> tasks_for_mode(const std::string& mode, AspectId aspect) {
  std::vector<AspectId> tasks;
  if (mode == "singletask") {
    tasks = {aspect};
  } else if (mode == "singletask+aae") {
    tasks = {aspect, AspectId::kDialect};
  } else if (mode == "multitask" || mode == "multitask+aae") {
    tasks.assign(kBiasAspects.begin(), kBiasAspects.end());
    if (mode == "multitask+aae") tasks.push_back(AspectId::kDialect);
  } else {
    throw ConfigError("mode must be one of singletask, singletask+aae, "
                      "multitask, multitask+aae; got \"" + mode + "\"");
  }
  return tasks;
}

inline void cmd_train_bias(const CommandOptions& opts) {
  const Config& cfg = opts.config;
  const std::uint64_t seed = detail::seed_of(opts);
  const std::string mode = opts.mode ? *opts.mode : cfg.get_string("mode", "singletask");
  const AspectId aspect = parse_aspect_or_throw(cfg.get_string("aspect", "offensive"));
  if (aspect == AspectId::kDialect) {
    throw ConfigError("aspect must be a bias aspect, not dialect");
  }
  const std::vector<AspectId> tasks = tasks_for_mode(mode, aspect);

  const std::string corpus_path =
      cfg.get_string("corpus", opts.out_dir + "/augmented_corpus.jsonl");
  detail::require_input_file(corpus_path);
  detail::ensure_out_dir(opts.out_dir);
  const std::vector<Document> docs = load_jsonl(corpus_path);

  const DatasetSplit split =
      stratified_split(docs, aspect, cfg.get_double("train_frac", 0.8),
                       cfg.get_double("val_frac", 0.0), seed);

  const NgramConfig ngrams = detail::ngrams_from_config(cfg);
  detail::FeaturizedPool data = detail::build_pools(
      split.train, tasks, ngrams, cfg.get_bool("weighted_loss", false));

  const std::uint32_t hidden = static_cast<std::uint32_t>(cfg.get_u64("hidden", 32));
  MultitaskModel model = init_model(ngrams, hidden, tasks, seed);
  std::string mode_tag = mode;
  for (char& c : mode_tag) {
    if (c == '+') c = '_';
  }
  model.model_id = mode_tag + "-" + std::string(aspect_name(aspect)) + "-s" +
                   std::to_string(seed);
  model.metadata["kind"] = "bias";
  model.metadata["mode"] = mode;
  model.metadata["aspect"] = std::string(aspect_name(aspect));
  model.metadata["seed"] = std::to_string(seed);
  model.metadata["config_hash"] = cfg.hash();

  const TrainStats stats =
      train(model, data.features, data.pools, detail::train_config_from(cfg, seed));

  const std::string model_name = cfg.get_string("model_name", "bias_" + mode_tag);
  detail::write_trace(opts.out_dir + "/" + model_name + "_trace.csv", stats);
  save_model(model, opts.out_dir + "/" + model_name + ".bin");
  // every mode trained from the same corpus, seed and split fractions sees
  // the same test docs, so this file is shared by the later evaluate step
  write_jsonl(split.test, opts.out_dir + "/bias_test_corpus.jsonl");
  detail::write_text(opts.out_dir + "/" + model_name + "_split.json",
                     split_manifest(split).dump(2) + "\n");

  std::printf("%s (%zu head%s), %zu train docs, %llu steps\n", mode.c_str(),
              model.heads.size(), model.heads.size() == 1 ? "" : "s",
              split.train.size(),
              static_cast<unsigned long long>(stats.total_steps));
  std::printf("test split results (%s head):\n",
              std::string(aspect_name(aspect)).c_str());
  detail::print_prf_table(detail::score_task(model, split.test, aspect));
  std::printf("model written to %s/%s.bin\n", opts.out_dir.c_str(), model_name.c_str());
}

// ---------------------------------------------------------------------------
// evaluate: per-aspect tables, fairness block, impossible-combination
// counts, and gated significance comparisons of every model against the
// first one.

inline void cmd_evaluate(const CommandOptions& opts) {
  const Config& cfg = opts.config;
  const std::uint64_t seed = detail::seed_of(opts);
  const std::string corpus_path =
      cfg.get_string("corpus", opts.out_dir + "/bias_test_corpus.jsonl");
  detail::require_input_file(corpus_path);
  detail::ensure_out_dir(opts.out_dir);

  std::vector<std::string> model_paths;
  {
    const std::string models = cfg.require_string("models");
    std::size_t start = 0;
    while (start <= models.size()) {
      const std::size_t comma = models.find(',', start);
      const std::string part =
          models.substr(start, comma == std::string::npos ? std::string::npos
                                                          : comma - start);
      if (!part.empty()) model_paths.push_back(part);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (model_paths.empty()) throw ConfigError("config key \"models\" lists no model files");
  }

  const std::vector<Document> docs = load_jsonl(corpus_path);
  if (docs.empty()) throw ConfigError("evaluate: corpus is empty: " + corpus_path);

  EvaluationReport report;
  report.corpus_path = corpus_path;
  report.n_docs = docs.size();
  report.config_hash = cfg.hash();
  report.subset_seed = cfg.get_u64("subset_seed", seed);
  report.n_subsets = cfg.get_u64("n_subsets", 10);

  for (const Document& d : docs) {
    if (!d.has_label(AspectId::kDialect)) {
      throw ConfigError("document \"" + d.id +
                        "\" has no dialect label; run the augment subcommand first");
    }
    const bool augmented =
        d.dialect_source && d.dialect_source->rfind("model:", 0) == 0;
    (augmented ? report.augmented_group_labels : report.gold_group_labels)++;
  }

  for (const std::string& path : model_paths) {
    detail::require_input_file(path);
    const MultitaskModel model = load_model(path);
    std::string name = std::filesystem::path(path).stem().string();
    for (const ModelEval& existing : report.models) {
      if (existing.name == name) {
        throw ConfigError("two model files share the name \"" + name + "\"");
      }
    }
    report.models.push_back(evaluate_model(name, model, docs));
  }

  if (report.models.size() > 1) {
    AspectId compare_aspect = AspectId::kOffensive;
    bool found = false;
    if (cfg.has("compare_aspect")) {
      compare_aspect = parse_aspect_or_throw(cfg.require_string("compare_aspect"));
      found = true;
      for (const ModelEval& m : report.models) {
        if (m.aspects.find(compare_aspect) == m.aspects.end()) {
          throw ConfigError("model \"" + m.name + "\" has no head for compare_aspect \"" +
                            std::string(aspect_name(compare_aspect)) + "\"");
        }
      }
    } else {
      for (AspectId a : kBiasAspects) {
        const bool in_all = std::all_of(
            report.models.begin(), report.models.end(),
            [&](const ModelEval& m) { return m.aspects.count(a) > 0; });
        if (in_all) {
          compare_aspect = a;
          found = true;
          break;
        }
      }
    }
    if (found) {
      if (docs.size() < report.n_subsets) {
        throw ConfigError("corpus smaller than n_subsets; lower n_subsets");
      }
      SignificanceConfig sig_cfg;
      sig_cfg.alpha_normality = cfg.get_double("alpha_normality", 0.05);
      sig_cfg.n_subsets = report.n_subsets;
      sig_cfg.alternative = Alternative::kGreater;
      std::vector<int> golds;
      golds.reserve(docs.size());
      for (const Document& d : docs) golds.push_back(*d.label(compare_aspect));
      for (std::size_t i = 1; i < report.models.size(); ++i) {
        report.comparisons.push_back(compare_on_subsets(report.models[0],
                                                        report.models[i],
                                                        compare_aspect, golds, sig_cfg,
                                                        report.subset_seed));
      }
    }
  }

  const nlohmann::json json = report_to_json(report);
  detail::write_text(opts.out_dir + "/report.json", json.dump(2) + "\n");
  detail::write_text(opts.out_dir + "/report.csv", report_to_csv(report));

  for (const ModelEval& m : report.models) {
    for (const auto& [aspect, ae] : m.aspects) {
      std::printf("%s/%s: macro F1 %.3f | TPR %.3f/%.3f d=%.3f | FPR %.3f/%.3f d=%.3f "
                  "| PPV %.3f/%.3f d=%.3f\n",
                  m.name.c_str(), aspect_name(aspect).data(), ae.macro_f1,
                  ae.rates[0].tpr, ae.rates[1].tpr, ae.deltas.tpr_delta, ae.rates[0].fpr,
                  ae.rates[1].fpr, ae.deltas.fpr_delta, ae.rates[0].ppv, ae.rates[1].ppv,
                  ae.deltas.ppv_delta);
    }
  }
  for (const ComparisonResult& c : report.comparisons) {
    std::printf("%s vs %s on %s: %s p=%.6g%s%s\n", c.candidate.c_str(),
                c.baseline.c_str(), aspect_name(c.aspect).data(),
                test_kind_name(c.sig.test), c.sig.p_value,
                c.marker.empty() ? "" : " ", c.marker.c_str());
  }
  std::printf("report written to %s/report.json and %s/report.csv\n",
              opts.out_dir.c_str(), opts.out_dir.c_str());
}

}  // namespace fairmtl
