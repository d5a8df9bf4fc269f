#pragma once

#include <map>
#include <optional>
#include <string>

#include "fairmtl/aspects.hpp"

namespace fairmtl {

// One text with optional per-aspect binary labels and an optional dialect
// label (1 = dialect, 0 = not). Absent labels stay absent; they are never
// imputed, and training skips a document for tasks whose label is missing.
struct Document {
  std::string id;
  std::string text;        // raw, as ingested
  std::string clean_text;  // lowercase ASCII words, single-spaced
  std::map<AspectId, int> labels;  // values are 0 or 1; dialect lives here too
  std::optional<std::string> dialect_source;  // e.g. "model:<id>" when augmented

  std::optional<int> label(AspectId a) const {
    auto it = labels.find(a);
    if (it == labels.end()) return std::nullopt;
    return it->second;
  }

  bool has_label(AspectId a) const { return labels.count(a) > 0; }

  std::optional<int> dialect() const { return label(AspectId::kDialect); }

  bool operator==(const Document& other) const = default;
};

}  // namespace fairmtl
