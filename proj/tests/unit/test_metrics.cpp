#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <vector>

#include <fairmtl/metrics.hpp>

using fairmtl::ConfusionCounts;
using fairmtl::confusion;
using fairmtl::fairness_deltas;
using fairmtl::grouped_eval;
using fairmtl::GroupRates;
using fairmtl::group_rates;
using fairmtl::impossible_combinations;
using fairmtl::macro_f1;
using fairmtl::Prf;
using fairmtl::prf;
using fairmtl::prf_negative;
using fairmtl::AspectId;

TEST_CASE("confusion counts a hand-checked example") {
  //            tp fn fp tn tp
  const std::vector<int> preds = {1, 0, 1, 0, 1};
  const std::vector<int> golds = {1, 1, 0, 0, 1};
  const ConfusionCounts c = confusion(preds, golds);
  CHECK(c.tp == 2);
  CHECK(c.fn == 1);
  CHECK(c.fp == 1);
  CHECK(c.tn == 1);
  CHECK(c.total() == 5);
}

TEST_CASE("confusion validates input") {
  CHECK_THROWS_AS(confusion({1, 0}, {1}), std::invalid_argument);
  CHECK_THROWS_AS(confusion({}, {}), std::invalid_argument);
  CHECK_THROWS_AS(confusion({2}, {1}), std::invalid_argument);
  CHECK_THROWS_AS(confusion({1}, {-1}), std::invalid_argument);
}

TEST_CASE("prf on a known confusion") {
  const Prf p = prf(ConfusionCounts{6, 2, 10, 2});
  CHECK(p.precision == Catch::Approx(0.75).epsilon(1e-15));
  CHECK(p.recall == Catch::Approx(0.75).epsilon(1e-15));
  CHECK(p.f1 == Catch::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("prf degenerate denominators yield zero") {
  // never predicts positive: precision 0/0 -> 0
  const Prf p = prf(ConfusionCounts{0, 0, 5, 3});
  CHECK(p.precision == 0.0);
  CHECK(p.recall == 0.0);
  CHECK(p.f1 == 0.0);
  // no gold positives at all
  const Prf q = prf(ConfusionCounts{0, 2, 6, 0});
  CHECK(q.recall == 0.0);
  CHECK(q.f1 == 0.0);
}

TEST_CASE("prf_negative mirrors prf with classes swapped") {
  const ConfusionCounts c{6, 2, 10, 3};
  const Prf neg = prf_negative(c);
  // negative-class precision: tn / (tn + fn), recall: tn / (tn + fp)
  CHECK(neg.precision == Catch::Approx(10.0 / 13.0).epsilon(1e-15));
  CHECK(neg.recall == Catch::Approx(10.0 / 12.0).epsilon(1e-15));
}

TEST_CASE("macro f1 averages per-class scores") {
  CHECK(macro_f1({0.8, 0.6}) == Catch::Approx(0.7).epsilon(1e-15));
  CHECK(macro_f1({1.0}) == 1.0);
  CHECK_THROWS_AS(macro_f1({}), std::invalid_argument);
}

TEST_CASE("metrics match a brute-force recount on every small assignment") {
  // exhaustive over all (pred, gold) pairs of length <= 8: metrics are
  // functions of the counts alone, so enumerating count splits covers every
  // assignment up to permutation, and assignments are checked directly below
  for (std::uint64_t tp = 0; tp <= 4; ++tp) {
    for (std::uint64_t fp = 0; fp <= 4; ++fp) {
      for (std::uint64_t tn = 0; tn <= 4; ++tn) {
        for (std::uint64_t fn = 0; fn <= 4; ++fn) {
          if (tp + fp + tn + fn == 0) continue;
          std::vector<int> preds, golds;
          for (std::uint64_t i = 0; i < tp; ++i) { preds.push_back(1); golds.push_back(1); }
          for (std::uint64_t i = 0; i < fp; ++i) { preds.push_back(1); golds.push_back(0); }
          for (std::uint64_t i = 0; i < tn; ++i) { preds.push_back(0); golds.push_back(0); }
          for (std::uint64_t i = 0; i < fn; ++i) { preds.push_back(0); golds.push_back(1); }
          const ConfusionCounts c = confusion(preds, golds);
          REQUIRE(c.tp == tp);
          REQUIRE(c.fp == fp);
          REQUIRE(c.tn == tn);
          REQUIRE(c.fn == fn);
          const Prf p = prf(c);
          const double prec = tp + fp ? double(tp) / double(tp + fp) : 0.0;
          const double rec = tp + fn ? double(tp) / double(tp + fn) : 0.0;
          const double f1 = prec + rec ? 2 * prec * rec / (prec + rec) : 0.0;
          REQUIRE(p.precision == prec);
          REQUIRE(p.recall == rec);
          REQUIRE(p.f1 == f1);
        }
      }
    }
  }
}

TEST_CASE("grouped eval splits counts by group and sums to the overall") {
  const std::vector<int> preds = {1, 0, 1, 1, 0, 0};
  const std::vector<int> golds = {1, 1, 0, 1, 0, 1};
  const std::vector<int> groups = {0, 0, 0, 1, 1, 1};
  const auto ge = grouped_eval(preds, golds, groups);
  CHECK(ge.by_group[0].tp == 1);
  CHECK(ge.by_group[0].fn == 1);
  CHECK(ge.by_group[0].fp == 1);
  CHECK(ge.by_group[1].tp == 1);
  CHECK(ge.by_group[1].tn == 1);
  CHECK(ge.by_group[1].fn == 1);
  ConfusionCounts sum = ge.by_group[0];
  sum += ge.by_group[1];
  CHECK(ge.overall == sum);
}

TEST_CASE("grouped eval refuses an absent group") {
  CHECK_THROWS_WITH(grouped_eval({1, 0}, {1, 0}, {0, 0}),
                    Catch::Matchers::ContainsSubstring("group 1 has no members"));
  CHECK_THROWS_WITH(grouped_eval({1, 0}, {1, 0}, {1, 1}),
                    Catch::Matchers::ContainsSubstring("group 0 has no members"));
}

TEST_CASE("group rates on a known confusion") {
  const GroupRates r = group_rates(ConfusionCounts{8, 4, 12, 2});
  CHECK(r.tpr == Catch::Approx(0.8).epsilon(1e-15));
  CHECK(r.fpr == Catch::Approx(0.25).epsilon(1e-15));
  CHECK(r.ppv == Catch::Approx(8.0 / 12.0).epsilon(1e-15));
}

TEST_CASE("fairness deltas reproduce the reference singletask gaps") {
  GroupRates g1, g2;
  g1.tpr = 0.893;
  g2.tpr = 0.918;
  g1.ppv = 0.860;
  g2.ppv = 0.826;
  const auto d = fairness_deltas(g1, g2);
  CHECK(std::fabs(d.tpr_delta - 0.025) < 1e-12);
  CHECK(std::fabs(d.ppv_delta - 0.034) < 1e-12);
  CHECK(d.tpr_signed == Catch::Approx(-0.025).epsilon(1e-9));
  CHECK(d.ppv_signed == Catch::Approx(0.034).epsilon(1e-9));
}

TEST_CASE("fairness deltas are order-symmetric in absolute value") {
  GroupRates a{0.7, 0.3, 0.9};
  GroupRates b{0.5, 0.4, 0.8};
  const auto ab = fairness_deltas(a, b);
  const auto ba = fairness_deltas(b, a);
  CHECK(ab.tpr_delta == ba.tpr_delta);
  CHECK(ab.fpr_delta == ba.fpr_delta);
  CHECK(ab.ppv_delta == ba.ppv_delta);
  CHECK(ab.tpr_signed == -ba.tpr_signed);
  GroupRates bad{1.5, 0.0, 0.0};
  CHECK_THROWS_AS(fairness_deltas(a, bad), std::invalid_argument);
}

TEST_CASE("impossible combinations match hand enumeration") {
  using Doc = std::map<AspectId, int>;
  auto doc = [](int off, int intent, int group, int ingroup) {
    return Doc{{AspectId::kOffensive, off},
               {AspectId::kIntent, intent},
               {AspectId::kTargetGroup, group},
               {AspectId::kIngroup, ingroup}};
  };
  const std::vector<Doc> preds = {
      doc(1, 1, 1, 1),  // consistent
      doc(0, 1, 1, 0),  // intent without offensive
      doc(1, 0, 0, 1),  // ingroup without group
      doc(0, 1, 0, 1),  // both violations at once
      doc(0, 0, 0, 0),  // consistent
  };
  const auto counts = impossible_combinations(preds);
  CHECK(counts.intent_without_offensive == 2);
  CHECK(counts.ingroup_without_group == 2);
  CHECK(counts.total() == 4);
}

TEST_CASE("impossible combinations require all four predictions") {
  std::map<AspectId, int> partial{{AspectId::kIntent, 1},
                                  {AspectId::kOffensive, 1},
                                  {AspectId::kIngroup, 0}};
  CHECK_THROWS_WITH(impossible_combinations({partial}),
                    Catch::Matchers::ContainsSubstring("group"));
  CHECK(impossible_combinations({}).total() == 0);
}
