#pragma once

#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "fairmtl/document.hpp"
#include "fairmtl/preprocess.hpp"

namespace fairmtl {

// Corpus files are UTF-8 JSON lines. Record schema:
//   {"id": "...", "text": "...",
//    "labels": {"offensive": 0/1, "intent": 0/1, "lewd": 0/1,
//               "group": 0/1, "ingroup": 0/1},   // each field optional
//    "dialect": 0/1,                             // optional
//    "dialect_source": "..."}                    // optional
// Unknown fields are rejected so schema drift surfaces immediately.

namespace detail {

inline int parse_binary_label(const nlohmann::json& v, std::size_t line_no) {
  if (!v.is_number_integer() || (v.get<int>() != 0 && v.get<int>() != 1)) {
    throw std::runtime_error("label out of range at line " +
                             std::to_string(line_no));
  }
  return v.get<int>();
}

inline Document parse_record(const std::string& line, std::size_t line_no) {
  nlohmann::json rec;
  try {
    rec = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception&) {
    throw std::runtime_error("malformed JSON at line " + std::to_string(line_no));
  }
  if (!rec.is_object()) {
    throw std::runtime_error("record is not an object at line " +
                             std::to_string(line_no));
  }

  static const std::set<std::string> known = {"id", "text", "labels", "dialect",
                                              "dialect_source"};
  for (auto it = rec.begin(); it != rec.end(); ++it) {
    if (!known.count(it.key())) {
      throw std::runtime_error("unknown field \"" + it.key() + "\" at line " +
                               std::to_string(line_no));
    }
  }
  if (!rec.contains("id") || !rec["id"].is_string()) {
    throw std::runtime_error("missing or non-string \"id\" at line " +
                             std::to_string(line_no));
  }
  if (!rec.contains("text") || !rec["text"].is_string()) {
    throw std::runtime_error("missing or non-string \"text\" at line " +
                             std::to_string(line_no));
  }

  Document doc;
  doc.id = rec["id"].get<std::string>();
  doc.text = rec["text"].get<std::string>();
  doc.clean_text = preprocess(doc.text);

  if (rec.contains("labels")) {
    const auto& labels = rec["labels"];
    if (!labels.is_object()) {
      throw std::runtime_error("\"labels\" is not an object at line " +
                               std::to_string(line_no));
    }
    for (auto it = labels.begin(); it != labels.end(); ++it) {
      auto aspect = parse_aspect(it.key());
      if (!aspect || *aspect == AspectId::kDialect) {
        throw std::runtime_error("unknown label \"" + it.key() + "\" at line " +
                                 std::to_string(line_no));
      }
      doc.labels[*aspect] = parse_binary_label(it.value(), line_no);
    }
  }
  if (rec.contains("dialect")) {
    doc.labels[AspectId::kDialect] = parse_binary_label(rec["dialect"], line_no);
  }
  if (rec.contains("dialect_source")) {
    if (!rec["dialect_source"].is_string()) {
      throw std::runtime_error("non-string \"dialect_source\" at line " +
                               std::to_string(line_no));
    }
    doc.dialect_source = rec["dialect_source"].get<std::string>();
  }
  return doc;
}

}  // namespace detail

inline std::vector<Document> load_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open corpus file: " + path);

  std::vector<Document> docs;
  std::set<std::string> seen_ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    Document doc = detail::parse_record(line, line_no);
    if (!seen_ids.insert(doc.id).second) {
      throw std::runtime_error("duplicate id \"" + doc.id + "\" at line " +
                               std::to_string(line_no));
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

inline nlohmann::json to_record(const Document& doc) {
  nlohmann::json rec;
  rec["id"] = doc.id;
  rec["text"] = doc.text;
  nlohmann::json labels = nlohmann::json::object();
  for (AspectId a : kBiasAspects) {
    if (auto v = doc.label(a)) labels[std::string(aspect_name(a))] = *v;
  }
  if (!labels.empty()) rec["labels"] = labels;
  if (auto d = doc.dialect()) rec["dialect"] = *d;
  if (doc.dialect_source) rec["dialect_source"] = *doc.dialect_source;
  return rec;
}

inline void write_jsonl(const std::vector<Document>& docs, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write corpus file: " + path);
  for (const Document& doc : docs) {
    out << to_record(doc).dump() << "\n";
  }
}

}  // namespace fairmtl
