#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace fairmtl {

// Seedable 64-bit generator used everywhere randomness is needed, so that
// splits, subsampling, batching, and synthetic corpora are reproducible
// bit-for-bit across platforms and implementations. The algorithm is
// SplitMix64 (Steele, Lea & Flood 2014), chosen over std::mt19937_64 plus
// std distributions because the standard distributions are
// implementation-defined and would break cross-toolchain determinism.
//
// State update:  s += 0x9e3779b97f4a7c15
// Output mixing: z = s; z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9;
//                z = (z ^ (z >> 27)) * 0x94d049bb133111eb; return z ^ (z >> 31)
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), using the top 53 bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform in [0, n) by rejection sampling (unbiased, portable).
  std::uint64_t next_below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("next_below: n must be positive");
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t v = next_u64();
    while (v >= limit) v = next_u64();
    return v % n;
  }

  // Uniform integer in [lo, hi], inclusive.
  std::int64_t next_int(std::int64_t lo, std::int64_t hi) {
    if (lo > hi) throw std::invalid_argument("next_int: empty range");
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(next_below(span));
  }

  bool next_bernoulli(double p) { return next_double() < p; }

  // Fisher-Yates, iterating from the back.
  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(next_below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  // Derives an independent stream for a tagged purpose. Mixing the tag
  // through one SplitMix64 output keeps substreams decorrelated.
  SplitMix64 derive(std::uint64_t tag) const {
    SplitMix64 mixer(state_ ^ (0x632be59bd9b4e019ull * (tag + 1)));
    return SplitMix64(mixer.next_u64());
  }

 private:
  std::uint64_t state_;
};

}  // namespace fairmtl
