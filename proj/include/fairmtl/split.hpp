#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "fairmtl/document.hpp"
#include "fairmtl/rng.hpp"

namespace fairmtl {

struct DatasetSplit {
  std::vector<Document> train;
  std::vector<Document> validation;
  std::vector<Document> test;
  std::uint64_t seed = 0;
};

namespace detail {

// Shuffled positions of `docs` having label value `cls` for `label`.
inline std::vector<std::size_t> class_positions(const std::vector<Document>& docs,
                                                AspectId label, int cls,
                                                SplitMix64 rng) {
  std::vector<std::size_t> pos;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (docs[i].label(label) == cls) pos.push_back(i);
  }
  rng.shuffle(pos);
  return pos;
}

}  // namespace detail

// Splits `docs` into train/validation/test while preserving the class ratio
// of `strat_label` in every part (within one document per class). The split
// is a partition and is fully determined by `seed`. `val_frac` may be zero;
// the test part receives the remainder.
inline DatasetSplit stratified_split(const std::vector<Document>& docs,
                                     AspectId strat_label, double train_frac,
                                     double val_frac, std::uint64_t seed) {
  if (!(train_frac > 0.0 && train_frac < 1.0)) {
    throw std::invalid_argument("stratified_split: train_frac must be in (0,1)");
  }
  if (!(val_frac >= 0.0 && val_frac < 1.0) || train_frac + val_frac >= 1.0) {
    throw std::invalid_argument(
        "stratified_split: need val_frac in [0,1) and train_frac + val_frac < 1");
  }
  for (const Document& d : docs) {
    if (!d.has_label(strat_label)) {
      throw std::invalid_argument(
          "stratified_split: document \"" + d.id + "\" lacks the label \"" +
          std::string(aspect_name(strat_label)) + "\"");
    }
  }

  SplitMix64 base(seed);
  enum Part { kTrain = 0, kVal = 1, kTest = 2 };
  std::vector<std::size_t> part_of(docs.size(), kTest);
  for (int cls : {0, 1}) {
    auto pos = detail::class_positions(docs, strat_label, cls,
                                       base.derive(static_cast<std::uint64_t>(cls)));
    // Epsilon guards against 5 * 0.8 style float droop.
    const auto n_train = static_cast<std::size_t>(
        std::floor(train_frac * static_cast<double>(pos.size()) + 1e-9));
    const auto n_val = static_cast<std::size_t>(
        std::floor(val_frac * static_cast<double>(pos.size()) + 1e-9));
    for (std::size_t k = 0; k < pos.size(); ++k) {
      part_of[pos[k]] = k < n_train ? kTrain : (k < n_train + n_val ? kVal : kTest);
    }
  }

  DatasetSplit split;
  split.seed = seed;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    switch (part_of[i]) {
      case kTrain: split.train.push_back(docs[i]); break;
      case kVal:   split.validation.push_back(docs[i]); break;
      default:     split.test.push_back(docs[i]); break;
    }
  }
  return split;
}

// Balances a corpus on `label` by keeping every minority-class document and
// sampling the majority class down to the same count. Output preserves the
// input order.
inline std::vector<Document> subsample_balanced(const std::vector<Document>& docs,
                                                AspectId label,
                                                std::uint64_t seed) {
  std::vector<std::size_t> pos0, pos1;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    auto v = docs[i].label(label);
    if (!v) {
      throw std::invalid_argument("subsample_balanced: document \"" + docs[i].id +
                                  "\" lacks the label \"" +
                                  std::string(aspect_name(label)) + "\"");
    }
    (*v == 1 ? pos1 : pos0).push_back(i);
  }
  if (pos0.empty() || pos1.empty()) {
    throw std::invalid_argument(
        "subsample_balanced: class " + std::string(pos0.empty() ? "0" : "1") +
        " has no members");
  }

  const std::size_t target = std::min(pos0.size(), pos1.size());
  std::vector<bool> keep(docs.size(), false);
  SplitMix64 rng(seed);
  for (auto* cls : {&pos0, &pos1}) {
    if (cls->size() == target) {
      for (std::size_t i : *cls) keep[i] = true;
    } else {
      std::vector<std::size_t> shuffled = *cls;
      rng.shuffle(shuffled);
      for (std::size_t k = 0; k < target; ++k) keep[shuffled[k]] = true;
    }
  }

  std::vector<Document> out;
  out.reserve(2 * target);
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (keep[i]) out.push_back(docs[i]);
  }
  return out;
}

// Manifest of document ids per part, for reproducibility audits.
inline nlohmann::json split_manifest(const DatasetSplit& split) {
  nlohmann::json manifest;
  manifest["seed"] = split.seed;
  for (auto [name, part] : {std::pair{"train", &split.train},
                            {"validation", &split.validation},
                            {"test", &split.test}}) {
    auto ids = nlohmann::json::array();
    for (const Document& d : *part) ids.push_back(d.id);
    manifest[name] = std::move(ids);
  }
  return manifest;
}

}  // namespace fairmtl
