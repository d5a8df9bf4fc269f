#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fairmtl/preprocess.hpp"

namespace fairmtl {

// FNV-1a, 64-bit. Simple, fast, and easy to reimplement in other languages,
// which keeps hashed feature spaces comparable across implementations.
inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

struct NgramConfig {
  std::uint32_t dim = 1u << 18;  // hashed feature space size
  bool word_unigrams = true;
  bool word_bigrams = true;
  std::uint32_t char_min = 3;  // char n-gram range, inclusive; 0/0 disables
  std::uint32_t char_max = 5;

  bool operator==(const NgramConfig&) const = default;
};

// Sparse l2-normalized feature vector; indices strictly increasing, < dim.
struct FeatureVector {
  std::vector<std::pair<std::uint32_t, double>> entries;
  std::uint32_t dim = 0;

  double l2_norm() const {
    double s = 0.0;
    for (const auto& [i, v] : entries) s += v * v;
    return std::sqrt(s);
  }
};

// Hashes word unigrams/bigrams and character n-grams of already-preprocessed
// text into a fixed-size space. Each feature family gets a string namespace
// ("w1:", "w2:", "c3:".. ) before hashing so families cannot alias except by
// genuine hash collision, which the hashing trick accepts. Counts are
// l2-normalized. Empty text yields an empty vector.
inline FeatureVector featurize(std::string_view clean_text,
                               const NgramConfig& config) {
  if (config.dim == 0) throw std::invalid_argument("featurize: dim must be positive");

  std::map<std::uint32_t, double> counts;
  auto bump = [&](const std::string& gram) {
    counts[static_cast<std::uint32_t>(fnv1a64(gram) % config.dim)] += 1.0;
  };

  std::vector<std::string> tokens = detail::split_ws(clean_text);
  if (config.word_unigrams) {
    for (const auto& t : tokens) bump("w1:" + t);
  }
  if (config.word_bigrams) {
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
      bump("w2:" + tokens[i] + " " + tokens[i + 1]);
    }
  }
  for (std::uint32_t n = config.char_min; n >= 1 && n <= config.char_max; ++n) {
    if (clean_text.size() < n) break;
    const std::string prefix = "c" + std::to_string(n) + ":";
    for (std::size_t i = 0; i + n <= clean_text.size(); ++i) {
      bump(prefix + std::string(clean_text.substr(i, n)));
    }
  }

  FeatureVector fv;
  fv.dim = config.dim;
  fv.entries.assign(counts.begin(), counts.end());
  const double norm = fv.l2_norm();
  if (norm > 0.0) {
    for (auto& [i, v] : fv.entries) v /= norm;
  }
  return fv;
}

}  // namespace fairmtl
