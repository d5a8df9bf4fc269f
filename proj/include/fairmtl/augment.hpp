#pragma once

#include <stdexcept>
#include <vector>

#include "fairmtl/aspects.hpp"
#include "fairmtl/document.hpp"
#include "fairmtl/features.hpp"
#include "fairmtl/model.hpp"

namespace fairmtl {

// Adds model-predicted dialect labels to every document that lacks one.
// Existing labels survive unless overwrite is set, so gold annotations are
// never silently replaced. Model-assigned labels carry a provenance marker
// ("model:<id>") to keep them distinguishable from gold ones downstream.
inline std::vector<Document> augment(const std::vector<Document>& docs,
                                     const MultitaskModel& dialect_model,
                                     bool overwrite = false) {
  if (dialect_model.heads.find(AspectId::kDialect) == dialect_model.heads.end()) {
    throw std::invalid_argument("augment: model has no dialect head");
  }
  std::vector<Document> out;
  out.reserve(docs.size());
  for (const Document& doc : docs) {
    if (doc.has_label(AspectId::kDialect) && !overwrite) {
      out.push_back(doc);
      continue;
    }
    Document aug = doc;
    const FeatureVector x = featurize(aug.clean_text, dialect_model.ngrams);
    const Prediction pred = forward(dialect_model, x, AspectId::kDialect);
    aug.labels[AspectId::kDialect] = pred.label;
    aug.dialect_source = "model:" + dialect_model.model_id;
    out.push_back(std::move(aug));
  }
  return out;
}

}  // namespace fairmtl
