#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "fairmtl/aspects.hpp"

namespace fairmtl {

// Every ratio in this file uses the 0/0 -> 0 convention: a metric whose
// denominator is empty (no positive predictions, no positives in the gold
// labels, ...) is reported as 0 rather than NaN. Majority-class baselines
// then legitimately score 0 on the positive class.
inline double safe_ratio(double num, double den) {
  return den == 0.0 ? 0.0 : num / den;
}

struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const { return tp + fp + tn + fn; }

  ConfusionCounts& operator+=(const ConfusionCounts& o) {
    tp += o.tp;
    fp += o.fp;
    tn += o.tn;
    fn += o.fn;
    return *this;
  }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

namespace detail {
inline void require_binary(int v, const char* what) {
  if (v != 0 && v != 1) {
    throw std::invalid_argument(std::string(what) + " must be 0 or 1, got " +
                                std::to_string(v));
  }
}
}  // namespace detail

inline ConfusionCounts confusion(const std::vector<int>& preds,
                                 const std::vector<int>& golds) {
  if (preds.size() != golds.size()) {
    throw std::invalid_argument("confusion: preds and golds differ in length");
  }
  if (preds.empty()) throw std::invalid_argument("confusion: empty input");
  ConfusionCounts c;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    detail::require_binary(preds[i], "prediction");
    detail::require_binary(golds[i], "gold label");
    if (golds[i] == 1) {
      preds[i] == 1 ? ++c.tp : ++c.fn;
    } else {
      preds[i] == 1 ? ++c.fp : ++c.tn;
    }
  }
  return c;
}

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

inline Prf prf(const ConfusionCounts& c) {
  Prf out;
  out.precision = safe_ratio(static_cast<double>(c.tp), static_cast<double>(c.tp + c.fp));
  out.recall = safe_ratio(static_cast<double>(c.tp), static_cast<double>(c.tp + c.fn));
  out.f1 = safe_ratio(2.0 * out.precision * out.recall, out.precision + out.recall);
  return out;
}

// prf of the negative class: swap the roles of 0 and 1.
inline Prf prf_negative(const ConfusionCounts& c) {
  return prf(ConfusionCounts{c.tn, c.fn, c.tp, c.fp});
}

inline double macro_f1(const std::vector<double>& per_class_f1) {
  if (per_class_f1.empty()) throw std::invalid_argument("macro_f1: empty input");
  double sum = 0.0;
  for (double f : per_class_f1) sum += f;
  return sum / static_cast<double>(per_class_f1.size());
}

// Rates used by the fairness criteria. TPR doubles as positive-class recall.
struct GroupRates {
  double tpr = 0.0;
  double fpr = 0.0;
  double ppv = 0.0;
};

inline GroupRates group_rates(const ConfusionCounts& c) {
  GroupRates r;
  r.tpr = safe_ratio(static_cast<double>(c.tp), static_cast<double>(c.tp + c.fn));
  r.fpr = safe_ratio(static_cast<double>(c.fp), static_cast<double>(c.fp + c.tn));
  r.ppv = safe_ratio(static_cast<double>(c.tp), static_cast<double>(c.tp + c.fp));
  return r;
}

struct GroupedEval {
  ConfusionCounts overall;
  std::array<ConfusionCounts, 2> by_group;  // indexed by group id
};

// Confusion counts within each dialect group. Group counts always sum to the
// overall counts; evaluation with an absent group is refused rather than
// producing rates over nothing.
inline GroupedEval grouped_eval(const std::vector<int>& preds,
                                const std::vector<int>& golds,
                                const std::vector<int>& groups) {
  if (preds.size() != golds.size() || preds.size() != groups.size()) {
    throw std::invalid_argument("grouped_eval: input lengths differ");
  }
  if (preds.empty()) throw std::invalid_argument("grouped_eval: empty input");
  std::array<std::uint64_t, 2> members{0, 0};
  GroupedEval out;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    detail::require_binary(preds[i], "prediction");
    detail::require_binary(golds[i], "gold label");
    detail::require_binary(groups[i], "group id");
    ++members[static_cast<std::size_t>(groups[i])];
    ConfusionCounts& c = out.by_group[static_cast<std::size_t>(groups[i])];
    if (golds[i] == 1) {
      preds[i] == 1 ? ++c.tp : ++c.fn;
    } else {
      preds[i] == 1 ? ++c.fp : ++c.tn;
    }
  }
  for (int g = 0; g < 2; ++g) {
    if (members[static_cast<std::size_t>(g)] == 0) {
      throw std::invalid_argument("grouped_eval: group " + std::to_string(g) +
                                  " has no members");
    }
  }
  out.overall = out.by_group[0];
  out.overall += out.by_group[1];
  return out;
}

// Equalized odds compares TPR and FPR across groups; predictive parity
// compares PPV. Deltas are reported as absolute values (order-symmetric);
// the signed versions (g1 minus g2) ride along for the JSON report.
struct FairnessDeltas {
  double tpr_delta = 0.0;
  double fpr_delta = 0.0;
  double ppv_delta = 0.0;
  double tpr_signed = 0.0;
  double fpr_signed = 0.0;
  double ppv_signed = 0.0;
};

inline FairnessDeltas fairness_deltas(const GroupRates& g1, const GroupRates& g2) {
  for (double r : {g1.tpr, g1.fpr, g1.ppv, g2.tpr, g2.fpr, g2.ppv}) {
    if (r < 0.0 || r > 1.0) {
      throw std::invalid_argument("fairness_deltas: rate outside [0,1]");
    }
  }
  FairnessDeltas d;
  d.tpr_signed = g1.tpr - g2.tpr;
  d.fpr_signed = g1.fpr - g2.fpr;
  d.ppv_signed = g1.ppv - g2.ppv;
  d.tpr_delta = std::fabs(d.tpr_signed);
  d.fpr_delta = std::fabs(d.fpr_signed);
  d.ppv_delta = std::fabs(d.ppv_signed);
  return d;
}

// Label combinations that cannot be true together: an intent to offend
// implies offensiveness, and an in-group annotation implies some target
// group. Counts how often a model's joint predictions violate each rule.
struct ImpossibleCounts {
  std::uint64_t intent_without_offensive = 0;
  std::uint64_t ingroup_without_group = 0;

  std::uint64_t total() const { return intent_without_offensive + ingroup_without_group; }
};

inline ImpossibleCounts impossible_combinations(
    const std::vector<std::map<AspectId, int>>& preds) {
  ImpossibleCounts out;
  auto get = [](const std::map<AspectId, int>& doc, AspectId a) {
    auto it = doc.find(a);
    if (it == doc.end()) {
      throw std::invalid_argument("impossible_combinations: missing prediction for task \"" +
                                  std::string(aspect_name(a)) + "\"");
    }
    detail::require_binary(it->second, "prediction");
    return it->second;
  };
  for (const auto& doc : preds) {
    // Fetch all four eagerly so a missing task is rejected regardless of the
    // values carried by the tasks that are present.
    const int offensive = get(doc, AspectId::kOffensive);
    const int intent = get(doc, AspectId::kIntent);
    const int group = get(doc, AspectId::kTargetGroup);
    const int ingroup = get(doc, AspectId::kIngroup);
    if (intent == 1 && offensive == 0) {
      ++out.intent_without_offensive;
    }
    if (ingroup == 1 && group == 0) {
      ++out.ingroup_without_group;
    }
  }
  return out;
}

}  // namespace fairmtl
