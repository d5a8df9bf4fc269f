#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include <fairmtl/split.hpp>
#include <fairmtl/synth.hpp>

using fairmtl::AspectId;
using fairmtl::DatasetSplit;
using fairmtl::Document;
using fairmtl::stratified_split;
using fairmtl::subsample_balanced;

namespace {

std::vector<Document> corpus(std::size_t n, std::uint64_t seed) {
  fairmtl::GenSpec spec = fairmtl::default_gen_spec();
  spec.n_docs = n;
  spec.seed = seed;
  return fairmtl::generate(spec);
}

std::size_t count_label(const std::vector<Document>& docs, AspectId a, int v) {
  return static_cast<std::size_t>(std::count_if(
      docs.begin(), docs.end(), [&](const Document& d) { return d.label(a) == v; }));
}

}  // namespace

TEST_CASE("stratified_split partitions the corpus exactly") {
  const std::vector<Document> docs = corpus(500, 1);
  const DatasetSplit s = stratified_split(docs, AspectId::kDialect, 0.7, 0.1, 5);
  CHECK(s.train.size() + s.validation.size() + s.test.size() == docs.size());
  std::multiset<std::string> in_ids, out_ids;
  for (const Document& d : docs) in_ids.insert(d.id);
  for (const auto* part : {&s.train, &s.validation, &s.test}) {
    for (const Document& d : *part) out_ids.insert(d.id);
  }
  CHECK(in_ids == out_ids);
}

TEST_CASE("stratified_split preserves class balance per part") {
  const std::vector<Document> docs = corpus(1000, 2);
  const DatasetSplit s = stratified_split(docs, AspectId::kDialect, 0.8, 0.0, 5);
  const std::size_t pos_total = count_label(docs, AspectId::kDialect, 1);
  const std::size_t pos_train = count_label(s.train, AspectId::kDialect, 1);
  const std::size_t pos_test = count_label(s.test, AspectId::kDialect, 1);
  // per-class counts are floor(frac * class size), so each part is within
  // one document of the global ratio
  CHECK(pos_train == static_cast<std::size_t>(0.8 * pos_total + 1e-9));
  CHECK(pos_test == pos_total - pos_train);
  CHECK(s.validation.empty());
}

TEST_CASE("stratified_split is deterministic in the seed") {
  const std::vector<Document> docs = corpus(300, 3);
  const DatasetSplit a = stratified_split(docs, AspectId::kOffensive, 0.8, 0.1, 17);
  const DatasetSplit b = stratified_split(docs, AspectId::kOffensive, 0.8, 0.1, 17);
  const DatasetSplit c = stratified_split(docs, AspectId::kOffensive, 0.8, 0.1, 18);
  CHECK(a.train == b.train);
  CHECK(a.validation == b.validation);
  CHECK(a.test == b.test);
  CHECK(a.train != c.train);
}

TEST_CASE("stratified_split validates fractions and labels") {
  const std::vector<Document> docs = corpus(20, 4);
  CHECK_THROWS_AS(stratified_split(docs, AspectId::kDialect, 0.0, 0.0, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(stratified_split(docs, AspectId::kDialect, 1.0, 0.0, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(stratified_split(docs, AspectId::kDialect, 0.7, 0.3, 1),
                  std::invalid_argument);
  std::vector<Document> missing = docs;
  missing[3].labels.erase(AspectId::kDialect);
  CHECK_THROWS_WITH(stratified_split(missing, AspectId::kDialect, 0.8, 0.0, 1),
                    Catch::Matchers::ContainsSubstring(missing[3].id));
}

TEST_CASE("subsample_balanced equalizes the classes and keeps order") {
  const std::vector<Document> docs = corpus(400, 6);
  const auto balanced = subsample_balanced(docs, AspectId::kDialect, 9);
  const std::size_t pos = count_label(balanced, AspectId::kDialect, 1);
  const std::size_t neg = count_label(balanced, AspectId::kDialect, 0);
  CHECK(pos == neg);
  const std::size_t minority =
      std::min(count_label(docs, AspectId::kDialect, 0),
               count_label(docs, AspectId::kDialect, 1));
  CHECK(pos == minority);
  // order preserved: ids appear in the same relative order as the input
  std::vector<std::string> ids;
  for (const Document& d : balanced) ids.push_back(d.id);
  CHECK(std::is_sorted(ids.begin(), ids.end()));  // generator ids are ordered
}

TEST_CASE("subsample_balanced needs both classes") {
  std::vector<Document> docs = corpus(30, 7);
  for (Document& d : docs) d.labels[AspectId::kDialect] = 1;
  CHECK_THROWS_AS(subsample_balanced(docs, AspectId::kDialect, 1),
                  std::invalid_argument);
}

TEST_CASE("split manifest lists every id under its part") {
  const std::vector<Document> docs = corpus(60, 8);
  const DatasetSplit s = stratified_split(docs, AspectId::kDialect, 0.5, 0.25, 2);
  const nlohmann::json m = fairmtl::split_manifest(s);
  CHECK(m["seed"] == 2);
  CHECK(m["train"].size() == s.train.size());
  CHECK(m["validation"].size() == s.validation.size());
  CHECK(m["test"].size() == s.test.size());
  CHECK(m["train"][0] == s.train[0].id);
}
