#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <fairmtl/features.hpp>

#include "featurize_golden.hpp"

using fairmtl::FeatureVector;
using fairmtl::featurize;
using fairmtl::fnv1a64;
using fairmtl::NgramConfig;

TEST_CASE("fnv1a64 matches published reference digests") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ull);
}

TEST_CASE("featurize reproduces the frozen golden vector") {
  const NgramConfig config;  // defaults: dim 2^18, uni+bi, char 3..5
  const FeatureVector fv = featurize("he be walkin", config);
  const auto golden = fairmtl_test::featurize_golden_he_be_walkin();
  REQUIRE(fv.entries.size() == golden.size());
  for (std::size_t i = 0; i < golden.size(); ++i) {
    CHECK(fv.entries[i].first == golden[i].first);
    CHECK(fv.entries[i].second == Catch::Approx(golden[i].second).epsilon(1e-12));
  }
}

TEST_CASE("feature vectors are unit length when nonempty") {
  const NgramConfig config;
  for (const char* text : {"a", "one two", "aaa bbb ccc ddd", "x y z x y z"}) {
    const FeatureVector fv = featurize(text, config);
    CHECK(fv.l2_norm() == Catch::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("featurize of empty text is empty") {
  const FeatureVector fv = featurize("", NgramConfig{});
  CHECK(fv.entries.empty());
  CHECK(fv.l2_norm() == 0.0);
}

TEST_CASE("indices are strictly increasing and below dim") {
  NgramConfig config;
  config.dim = 128;  // tiny space forces collisions; ordering must survive
  const FeatureVector fv = featurize("the quick brown fox jumps over", config);
  REQUIRE_FALSE(fv.entries.empty());
  for (std::size_t i = 0; i < fv.entries.size(); ++i) {
    CHECK(fv.entries[i].first < 128);
    if (i > 0) CHECK(fv.entries[i].first > fv.entries[i - 1].first);
  }
}

TEST_CASE("feature families can be disabled independently") {
  NgramConfig only_words;
  only_words.char_min = 0;
  only_words.char_max = 0;
  only_words.word_bigrams = false;
  const FeatureVector fv = featurize("aa bb cc", only_words);
  CHECK(fv.entries.size() == 3);  // three distinct unigrams, no other families

  NgramConfig nothing = only_words;
  nothing.word_unigrams = false;
  CHECK(featurize("aa bb cc", nothing).entries.empty());
}

TEST_CASE("repeated tokens accumulate counts before normalization") {
  NgramConfig config;
  config.char_min = 0;
  config.char_max = 0;
  config.word_bigrams = false;
  // "aa" appears twice, "bb" once: weights 2/sqrt(5) and 1/sqrt(5)
  const FeatureVector fv = featurize("aa bb aa", config);
  REQUIRE(fv.entries.size() == 2);
  double hi = std::max(fv.entries[0].second, fv.entries[1].second);
  double lo = std::min(fv.entries[0].second, fv.entries[1].second);
  CHECK(hi == Catch::Approx(2.0 / std::sqrt(5.0)).epsilon(1e-12));
  CHECK(lo == Catch::Approx(1.0 / std::sqrt(5.0)).epsilon(1e-12));
}

TEST_CASE("featurize rejects a zero dimension") {
  NgramConfig config;
  config.dim = 0;
  CHECK_THROWS_AS(featurize("x", config), std::invalid_argument);
}
