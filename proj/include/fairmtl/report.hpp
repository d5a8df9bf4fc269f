#pragma once

#include <array>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fairmtl/aspects.hpp"
#include "fairmtl/augment.hpp"
#include "fairmtl/config.hpp"
#include "fairmtl/document.hpp"
#include "fairmtl/metrics.hpp"
#include "fairmtl/model.hpp"
#include "fairmtl/significance.hpp"

namespace fairmtl {

// Full-precision evaluation results for one aspect of one model. Rounding
// to table format happens only when the CSV is printed; the JSON report
// carries these exact doubles, so every CSV cell has an unrounded source.
struct AspectEval {
  Prf positive;
  Prf negative;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  std::array<ConfusionCounts, 2> group_counts;  // [non-dialect, dialect]
  std::array<GroupRates, 2> rates;
  std::array<double, 2> group_macro_f1{0.0, 0.0};
  FairnessDeltas deltas;
};

struct ModelEval {
  std::string name;
  std::map<std::string, std::string> metadata;
  std::map<AspectId, AspectEval> aspects;
  std::map<AspectId, std::vector<int>> preds;  // kept for comparisons
  std::optional<std::uint64_t> intent_without_offensive;
  std::optional<std::uint64_t> ingroup_without_group;
};

struct ComparisonResult {
  std::string baseline;
  std::string candidate;
  AspectId aspect = AspectId::kOffensive;
  std::size_t k = 0;
  bool degenerate = false;  // identical subset scores; no test applicable
  SignificanceResult sig;
  std::string marker;
};

struct EvaluationReport {
  std::string corpus_path;
  std::size_t n_docs = 0;
  std::string config_hash;
  std::uint64_t subset_seed = 0;
  std::size_t n_subsets = 0;
  std::uint64_t gold_group_labels = 0;
  std::uint64_t augmented_group_labels = 0;
  std::vector<ModelEval> models;
  std::vector<ComparisonResult> comparisons;
};

inline double macro_f1_metric(const std::vector<int>& preds,
                              const std::vector<int>& golds) {
  const ConfusionCounts c = confusion(preds, golds);
  return macro_f1({prf(c).f1, prf_negative(c).f1});
}

// Scores one model on a corpus with gold aspect labels and (gold or
// augmented) dialect labels. Dialect is the grouping variable, so the
// model's own dialect head, if any, is not a reported aspect.
inline ModelEval evaluate_model(const std::string& name, const MultitaskModel& model,
                                const std::vector<Document>& docs) {
  if (docs.empty()) throw std::invalid_argument("evaluate: empty corpus");

  std::vector<int> groups;
  groups.reserve(docs.size());
  for (const Document& d : docs) {
    const auto dialect = d.dialect();
    if (!dialect) {
      throw ConfigError("evaluate: document \"" + d.id +
                        "\" has no dialect label; run the augment subcommand first");
    }
    groups.push_back(*dialect);
  }

  std::vector<FeatureVector> feats;
  feats.reserve(docs.size());
  for (const Document& d : docs) feats.push_back(featurize(d.clean_text, model.ngrams));

  ModelEval eval;
  eval.name = name;
  eval.metadata = model.metadata;
  for (AspectId a : kBiasAspects) {
    if (model.heads.find(a) == model.heads.end()) continue;
    std::vector<int> preds, golds;
    preds.reserve(docs.size());
    golds.reserve(docs.size());
    for (std::size_t i = 0; i < docs.size(); ++i) {
      const auto gold = docs[i].label(a);
      if (!gold) {
        throw ConfigError("evaluate: document \"" + docs[i].id +
                          "\" lacks a gold label for task \"" +
                          std::string(aspect_name(a)) + "\"");
      }
      golds.push_back(*gold);
      preds.push_back(forward(model, feats[i], a).label);
    }

    const GroupedEval ge = grouped_eval(preds, golds, groups);
    AspectEval ae;
    ae.positive = prf(ge.overall);
    ae.negative = prf_negative(ge.overall);
    ae.macro_precision = (ae.positive.precision + ae.negative.precision) / 2.0;
    ae.macro_recall = (ae.positive.recall + ae.negative.recall) / 2.0;
    ae.macro_f1 = macro_f1({ae.positive.f1, ae.negative.f1});
    ae.group_counts = ge.by_group;
    for (int g = 0; g < 2; ++g) {
      const auto gi = static_cast<std::size_t>(g);
      ae.rates[gi] = group_rates(ge.by_group[gi]);
      ae.group_macro_f1[gi] =
          macro_f1({prf(ge.by_group[gi]).f1, prf_negative(ge.by_group[gi]).f1});
    }
    // signed deltas read non-dialect minus dialect; group 0 is non-dialect
    ae.deltas = fairness_deltas(ae.rates[0], ae.rates[1]);
    eval.aspects[a] = ae;
    eval.preds[a] = std::move(preds);
  }
  if (eval.aspects.empty()) {
    throw ConfigError("evaluate: model \"" + name + "\" has no bias-aspect heads");
  }

  auto rule_count = [&](AspectId pos_task, AspectId neg_task) -> std::optional<std::uint64_t> {
    auto p = eval.preds.find(pos_task);
    auto n = eval.preds.find(neg_task);
    if (p == eval.preds.end() || n == eval.preds.end()) return std::nullopt;
    std::uint64_t count = 0;
    for (std::size_t i = 0; i < docs.size(); ++i) {
      if (p->second[i] == 1 && n->second[i] == 0) ++count;
    }
    return count;
  };
  eval.intent_without_offensive = rule_count(AspectId::kIntent, AspectId::kOffensive);
  eval.ingroup_without_group = rule_count(AspectId::kIngroup, AspectId::kTargetGroup);
  return eval;
}

// Candidate-vs-baseline comparison over k subset scores of macro F1.
// Identical score vectors admit no test (the normality gate cannot run);
// that case reports p = 0.5 and is flagged degenerate instead of erroring,
// since equal models are a legitimate evaluation input.
inline ComparisonResult compare_on_subsets(const ModelEval& baseline,
                                           const ModelEval& candidate,
                                           AspectId aspect,
                                           const std::vector<int>& golds,
                                           const SignificanceConfig& cfg,
                                           std::uint64_t seed) {
  ComparisonResult out;
  out.baseline = baseline.name;
  out.candidate = candidate.name;
  out.aspect = aspect;
  out.k = cfg.n_subsets;

  const std::vector<double> a = subset_scores(candidate.preds.at(aspect), golds,
                                              macro_f1_metric, cfg.n_subsets, seed);
  const std::vector<double> b = subset_scores(baseline.preds.at(aspect), golds,
                                              macro_f1_metric, cfg.n_subsets, seed);
  if (a == b) {
    out.degenerate = true;
    out.sig.test = TestKind::kPairedT;
    out.sig.statistic = 0.0;
    out.sig.p_value = 0.5;
    out.sig.n = a.size();
    out.sig.low_power = a.size() < kLowPowerThreshold;
    return out;
  }
  out.sig = gated_compare(a, b, cfg);
  out.marker = significance_marker(out.sig.p_value);
  return out;
}

// ---------------------------------------------------------------------------
// Emission

namespace detail {

inline nlohmann::json prf_json(const Prf& p) {
  return {{"precision", p.precision}, {"recall", p.recall}, {"f1", p.f1}};
}

inline nlohmann::json counts_json(const ConfusionCounts& c) {
  return {{"tp", c.tp}, {"fp", c.fp}, {"tn", c.tn}, {"fn", c.fn}};
}

inline nlohmann::json sig_json(const SignificanceResult& s) {
  nlohmann::json j{{"test", test_kind_name(s.test)},
                   {"statistic", s.statistic},
                   {"p_value", s.p_value},
                   {"n", s.n},
                   {"low_power", s.low_power}};
  if (s.gate) {
    j["normality_gate"] = {{"w", s.gate->w}, {"p", s.gate->p}, {"passed", s.gate->passed}};
  }
  return j;
}

inline std::string fmt3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

}  // namespace detail

inline nlohmann::json report_to_json(const EvaluationReport& r) {
  nlohmann::json models = nlohmann::json::array();
  for (const ModelEval& m : r.models) {
    nlohmann::json aspects;
    for (const auto& [aspect, ae] : m.aspects) {
      nlohmann::json groups;
      const char* group_names[2] = {"non_dialect", "dialect"};
      for (int g = 0; g < 2; ++g) {
        const auto gi = static_cast<std::size_t>(g);
        groups[group_names[gi]] = {{"counts", detail::counts_json(ae.group_counts[gi])},
                                   {"tpr", ae.rates[gi].tpr},
                                   {"fpr", ae.rates[gi].fpr},
                                   {"ppv", ae.rates[gi].ppv},
                                   {"macro_f1", ae.group_macro_f1[gi]}};
      }
      aspects[std::string(aspect_name(aspect))] = {
          {"positive", detail::prf_json(ae.positive)},
          {"negative", detail::prf_json(ae.negative)},
          {"macro", {{"precision", ae.macro_precision},
                     {"recall", ae.macro_recall},
                     {"f1", ae.macro_f1}}},
          {"groups", groups},
          {"deltas", {{"tpr", ae.deltas.tpr_delta},
                      {"fpr", ae.deltas.fpr_delta},
                      {"ppv", ae.deltas.ppv_delta},
                      {"tpr_signed", ae.deltas.tpr_signed},
                      {"fpr_signed", ae.deltas.fpr_signed},
                      {"ppv_signed", ae.deltas.ppv_signed}}}};
    }
    nlohmann::json entry{{"name", m.name}, {"metadata", m.metadata}, {"aspects", aspects}};
    nlohmann::json impossible;
    if (m.intent_without_offensive) {
      impossible["intent_without_offensive"] = *m.intent_without_offensive;
    }
    if (m.ingroup_without_group) {
      impossible["ingroup_without_group"] = *m.ingroup_without_group;
    }
    if (!impossible.empty()) entry["impossible_combinations"] = impossible;
    models.push_back(entry);
  }

  nlohmann::json comparisons = nlohmann::json::array();
  for (const ComparisonResult& c : r.comparisons) {
    nlohmann::json j{{"baseline", c.baseline},
                     {"candidate", c.candidate},
                     {"aspect", std::string(aspect_name(c.aspect))},
                     {"n_subsets", c.k},
                     {"degenerate", c.degenerate},
                     {"marker", c.marker}};
    j["result"] = detail::sig_json(c.sig);
    comparisons.push_back(j);
  }

  return nlohmann::json{
      {"report_version", 1},
      {"corpus", r.corpus_path},
      {"n_docs", r.n_docs},
      {"config_hash", r.config_hash},
      {"subset_seed", r.subset_seed},
      {"n_subsets", r.n_subsets},
      {"group_label_provenance",
       {{"gold", r.gold_group_labels}, {"augmented", r.augmented_group_labels}}},
      {"models", models},
      {"comparisons", comparisons}};
}

// One row per model x aspect. Values are the JSON doubles rounded to three
// decimals; the significance column carries the marker of the comparison
// whose candidate is this model (empty for the baseline).
inline std::string report_to_csv(const EvaluationReport& r) {
  std::string csv =
      "model,aspect,pos_precision,pos_recall,pos_f1,"
      "neg_precision,neg_recall,neg_f1,mac_precision,mac_recall,mac_f1,"
      "tpr_non_dialect,tpr_dialect,tpr_delta,"
      "fpr_non_dialect,fpr_dialect,fpr_delta,"
      "ppv_non_dialect,ppv_dialect,ppv_delta,"
      "intent_without_offensive,ingroup_without_group,significance\n";
  for (const ModelEval& m : r.models) {
    std::string marker;
    for (const ComparisonResult& c : r.comparisons) {
      if (c.candidate == m.name) marker = c.marker;
    }
    for (const auto& [aspect, ae] : m.aspects) {
      csv += m.name;
      csv += ',';
      csv += std::string(aspect_name(aspect));
      for (double v : {ae.positive.precision, ae.positive.recall, ae.positive.f1,
                       ae.negative.precision, ae.negative.recall, ae.negative.f1,
                       ae.macro_precision, ae.macro_recall, ae.macro_f1,
                       ae.rates[0].tpr, ae.rates[1].tpr, ae.deltas.tpr_delta,
                       ae.rates[0].fpr, ae.rates[1].fpr, ae.deltas.fpr_delta,
                       ae.rates[0].ppv, ae.rates[1].ppv, ae.deltas.ppv_delta}) {
        csv += ',';
        csv += detail::fmt3(v);
      }
      csv += ',';
      if (m.intent_without_offensive) csv += std::to_string(*m.intent_without_offensive);
      csv += ',';
      if (m.ingroup_without_group) csv += std::to_string(*m.ingroup_without_group);
      csv += ',';
      csv += marker;
      csv += '\n';
    }
  }
  return csv;
}

}  // namespace fairmtl
