#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fairmtl/dist.hpp"
#include "fairmtl/rng.hpp"

namespace fairmtl {

enum class Alternative { kGreater, kLess };

enum class TestKind { kPairedT, kWilcoxon, kOneSampleT, kIndependentT };

inline const char* test_kind_name(TestKind k) {
  switch (k) {
    case TestKind::kPairedT: return "paired_t";
    case TestKind::kWilcoxon: return "wilcoxon";
    case TestKind::kOneSampleT: return "one_sample_t";
    case TestKind::kIndependentT: return "independent_t";
  }
  return "?";
}

struct NormalityGate {
  double w = 0.0;
  double p = 0.0;
  bool passed = false;
};

// Comparisons on fewer than 8 scores have little power either way; results
// are still computed but carry a flag so reports can say so.
constexpr std::size_t kLowPowerThreshold = 8;

struct SignificanceResult {
  TestKind test = TestKind::kPairedT;
  double statistic = 0.0;
  double p_value = 1.0;
  std::optional<NormalityGate> gate;
  std::size_t n = 0;
  bool low_power = false;
};

struct SignificanceConfig {
  double alpha_normality = 0.05;
  std::size_t n_subsets = 10;
  Alternative alternative = Alternative::kGreater;
};

namespace detail {

// Reported p-values are floored rather than ever printing exactly 0.
constexpr double kMinP = 1e-16;

inline double finish_p(double p) { return std::clamp(p, kMinP, 1.0); }

inline double mean_of(const std::vector<double>& x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

// Unbiased sample variance (n-1 denominator).
inline double sample_var(const std::vector<double>& x, double mean) {
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return ss / static_cast<double>(x.size() - 1);
}

inline double one_sided_t_p(double t, double df, Alternative alt) {
  const double cdf = student_t_cdf(t, df);
  return finish_p(alt == Alternative::kGreater ? 1.0 - cdf : cdf);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Shapiro-Wilk normality test, Royston's 1995 approximation (valid for
// 3 <= n <= 5000). Weights come from expected normal order statistics with
// polynomial corrections for the outermost one or two positions; the p-value
// maps a transform of 1-W onto a standard normal (exact arcsine form at n=3).

struct ShapiroResult {
  double w = 0.0;
  double p = 0.0;
};

inline ShapiroResult shapiro_wilk(const std::vector<double>& x) {
  const std::size_t n = x.size();
  if (n < 3 || n > 5000) {
    throw std::invalid_argument("shapiro_wilk: n must be in [3, 5000], got " +
                                std::to_string(n));
  }
  std::vector<double> s(x);
  std::sort(s.begin(), s.end());
  if (s.front() == s.back()) {
    throw std::invalid_argument("shapiro_wilk: all values identical");
  }

  const double an = static_cast<double>(n);
  std::vector<double> m(n);
  double ssq_m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    m[i] = inverse_normal_cdf((static_cast<double>(i + 1) - 0.375) / (an + 0.25));
    ssq_m += m[i] * m[i];
  }

  std::vector<double> a(n);
  if (n == 3) {
    a = {-std::sqrt(0.5), 0.0, std::sqrt(0.5)};
  } else {
    const double root_ssq = std::sqrt(ssq_m);
    const double u = 1.0 / std::sqrt(an);
    const double a_n = m[n - 1] / root_ssq + u * (0.221157 +
                       u * (-0.147981 + u * (-2.071190 + u * (4.434685 + u * -2.706056))));
    if (n > 5) {
      const double a_n1 = m[n - 2] / root_ssq + u * (0.042981 +
                          u * (-0.293762 + u * (-1.752461 + u * (5.682633 + u * -3.582633))));
      const double phi = (ssq_m - 2.0 * m[n - 1] * m[n - 1] - 2.0 * m[n - 2] * m[n - 2]) /
                         (1.0 - 2.0 * a_n * a_n - 2.0 * a_n1 * a_n1);
      const double root_phi = std::sqrt(phi);
      for (std::size_t i = 2; i + 2 < n; ++i) a[i] = m[i] / root_phi;
      a[n - 1] = a_n;
      a[n - 2] = a_n1;
      a[0] = -a_n;
      a[1] = -a_n1;
    } else {
      const double phi = (ssq_m - 2.0 * m[n - 1] * m[n - 1]) / (1.0 - 2.0 * a_n * a_n);
      const double root_phi = std::sqrt(phi);
      for (std::size_t i = 1; i + 1 < n; ++i) a[i] = m[i] / root_phi;
      a[n - 1] = a_n;
      a[0] = -a_n;
    }
  }

  const double mean = detail::mean_of(s);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    num += a[i] * s[i];
    den += (s[i] - mean) * (s[i] - mean);
  }
  ShapiroResult res;
  res.w = num * num / den;
  res.w = std::min(res.w, 1.0);

  if (n == 3) {
    constexpr double kPi6 = 1.90985931710274403;   // 6/pi
    constexpr double kStqr = 1.04719755119659775;  // asin(sqrt(3/4))
    res.p = std::clamp(kPi6 * (std::asin(std::sqrt(res.w)) - kStqr), 0.0, 1.0);
    return res;
  }
  const double one_minus_w = std::max(1.0 - res.w, 1e-15);
  double z;
  if (n <= 11) {
    const double g = -2.273 + 0.459 * an;
    const double mu = 0.5440 + an * (-0.39978 + an * (0.025054 + an * -0.0006714));
    const double sigma = std::exp(1.3822 + an * (-0.77857 + an * (0.062767 + an * -0.0020322)));
    z = (-std::log(g - std::log(one_minus_w)) - mu) / sigma;
  } else {
    const double ln_n = std::log(an);
    const double mu = -1.5861 + ln_n * (-0.31082 + ln_n * (-0.083751 + ln_n * 0.0038915));
    const double sigma = std::exp(-0.4803 + ln_n * (-0.082676 + ln_n * 0.0030302));
    z = (std::log(one_minus_w) - mu) / sigma;
  }
  res.p = std::clamp(1.0 - normal_cdf(z), 0.0, 1.0);
  return res;
}

// ---------------------------------------------------------------------------
// t-family tests. All p-values are one-sided.

inline SignificanceResult one_sample_t(const std::vector<double>& x, double mu0,
                                       Alternative alt) {
  if (x.size() < 2) throw std::invalid_argument("one_sample_t: need n >= 2");
  const double mean = detail::mean_of(x);
  const double var = detail::sample_var(x, mean);
  if (var == 0.0) throw std::invalid_argument("one_sample_t: zero variance");
  const double n = static_cast<double>(x.size());
  SignificanceResult r;
  r.test = TestKind::kOneSampleT;
  r.n = x.size();
  r.low_power = x.size() < kLowPowerThreshold;
  r.statistic = (mean - mu0) / std::sqrt(var / n);
  r.p_value = detail::one_sided_t_p(r.statistic, n - 1.0, alt);
  return r;
}

inline SignificanceResult paired_t_one_sided(const std::vector<double>& a,
                                             const std::vector<double>& b,
                                             Alternative alt) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("paired_t: sequences differ in length");
  }
  if (a.size() < 2) throw std::invalid_argument("paired_t: need n >= 2");
  std::vector<double> d(a.size());
  bool any_nonzero = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d[i] = a[i] - b[i];
    any_nonzero = any_nonzero || d[i] != 0.0;
  }
  if (!any_nonzero) throw std::invalid_argument("degenerate paired sample");
  SignificanceResult r = one_sample_t(d, 0.0, alt);
  r.test = TestKind::kPairedT;
  return r;
}

// Welch's unequal-variance form with Welch-Satterthwaite degrees of freedom.
inline SignificanceResult independent_t(const std::vector<double>& a,
                                        const std::vector<double>& b,
                                        Alternative alt) {
  if (a.size() < 2 || b.size() < 2) {
    throw std::invalid_argument("independent_t: both samples need n >= 2");
  }
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double ma = detail::mean_of(a);
  const double mb = detail::mean_of(b);
  const double va = detail::sample_var(a, ma);
  const double vb = detail::sample_var(b, mb);
  if (va == 0.0 && vb == 0.0) {
    throw std::invalid_argument("independent_t: zero variance in both samples");
  }
  const double sa = va / na;
  const double sb = vb / nb;
  const double df = (sa + sb) * (sa + sb) /
                    (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
  SignificanceResult r;
  r.test = TestKind::kIndependentT;
  r.n = a.size() + b.size();
  r.low_power = std::min(a.size(), b.size()) < kLowPowerThreshold;
  r.statistic = (ma - mb) / std::sqrt(sa + sb);
  r.p_value = detail::one_sided_t_p(r.statistic, df, alt);
  return r;
}

// ---------------------------------------------------------------------------
// Wilcoxon signed-rank test. Zero differences are dropped; ties in |d| get
// average ranks. For n <= 25 the null distribution is exact, obtained by
// counting sign assignments (rank sums are tracked as doubled integers so
// half-ranks from ties stay exact). Above that, a normal approximation with
// a 0.5 continuity correction and tie-corrected variance.
//
// In exact mode p(greater) = P(W+ >= w) and p(less) = P(W+ <= w), so
// p(greater) + p(less) = 1 + P(W+ = w), not exactly 1.

constexpr std::size_t kWilcoxonExactMax = 25;

inline SignificanceResult wilcoxon_signed_rank(const std::vector<double>& a,
                                               const std::vector<double>& b,
                                               Alternative alt) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("wilcoxon: sequences differ in length");
  }
  std::vector<double> d;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double di = a[i] - b[i];
    if (di != 0.0) d.push_back(di);
  }
  const std::size_t n = d.size();
  if (n < 3) {
    throw std::invalid_argument("wilcoxon: need at least 3 nonzero differences");
  }

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) {
    return std::fabs(d[i]) < std::fabs(d[j]);
  });

  // rank2[i] = 2 * rank of |d[i]|; ties share the average, still an integer.
  std::vector<std::uint64_t> rank2(n);
  std::vector<std::size_t> tie_sizes;
  for (std::size_t lo = 0; lo < n;) {
    std::size_t hi = lo;
    while (hi + 1 < n && std::fabs(d[idx[hi + 1]]) == std::fabs(d[idx[lo]])) ++hi;
    const std::uint64_t avg2 = static_cast<std::uint64_t>(lo + 1 + hi + 1);
    for (std::size_t k = lo; k <= hi; ++k) rank2[idx[k]] = avg2;
    tie_sizes.push_back(hi - lo + 1);
    lo = hi + 1;
  }

  std::uint64_t w_plus2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (d[i] > 0.0) w_plus2 += rank2[i];
  }

  SignificanceResult r;
  r.test = TestKind::kWilcoxon;
  r.n = n;
  r.low_power = n < kLowPowerThreshold;
  r.statistic = static_cast<double>(w_plus2) / 2.0;

  if (n <= kWilcoxonExactMax) {
    // count[s] = number of sign assignments with doubled rank sum s
    const std::uint64_t max2 = n * (n + 1);
    std::vector<std::uint64_t> count(max2 + 1, 0);
    count[0] = 1;
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint64_t r2 = rank2[i];
      for (std::uint64_t s = max2 + 1; s-- > r2;) count[s] += count[s - r2];
    }
    const double total = std::ldexp(1.0, static_cast<int>(n));  // 2^n
    double tail = 0.0;
    if (alt == Alternative::kGreater) {
      for (std::uint64_t s = w_plus2; s <= max2; ++s) tail += static_cast<double>(count[s]);
    } else {
      for (std::uint64_t s = 0; s <= w_plus2; ++s) tail += static_cast<double>(count[s]);
    }
    r.p_value = detail::finish_p(tail / total);
    return r;
  }

  const double nn = static_cast<double>(n);
  const double mean = nn * (nn + 1.0) / 4.0;
  double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0;
  for (std::size_t t : tie_sizes) {
    const double tt = static_cast<double>(t);
    var -= (tt * tt * tt - tt) / 48.0;
  }
  const double w = r.statistic;
  const double z = alt == Alternative::kGreater ? (w - mean - 0.5) / std::sqrt(var)
                                                : (w - mean + 0.5) / std::sqrt(var);
  r.p_value = detail::finish_p(alt == Alternative::kGreater ? 1.0 - normal_cdf(z)
                                                            : normal_cdf(z));
  return r;
}

// ---------------------------------------------------------------------------

inline void validate(const SignificanceConfig& cfg) {
  if (!(cfg.alpha_normality > 0.0 && cfg.alpha_normality < 1.0)) {
    throw std::invalid_argument("significance: alpha must be in (0,1)");
  }
  if (cfg.n_subsets < 2) {
    throw std::invalid_argument("significance: n_subsets must be >= 2");
  }
}

// Normality-gated paired comparison: Shapiro-Wilk on the differences picks
// between the paired t-test (normal enough) and the signed-rank test.
inline SignificanceResult gated_compare(const std::vector<double>& a,
                                        const std::vector<double>& b,
                                        const SignificanceConfig& cfg) {
  validate(cfg);
  if (a.size() != b.size()) {
    throw std::invalid_argument("gated_compare: sequences differ in length");
  }
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  const ShapiroResult sw = shapiro_wilk(d);

  NormalityGate gate{sw.w, sw.p, sw.p >= cfg.alpha_normality};
  SignificanceResult r = gate.passed
                             ? paired_t_one_sided(a, b, cfg.alternative)
                             : wilcoxon_signed_rank(a, b, cfg.alternative);
  r.gate = gate;
  return r;
}

// Scores a metric over k random subsets of (pred, gold) pairs. The shuffled
// data is cut into k chunks whose sizes differ by at most one; together the
// chunks partition the input.
using MetricFn = std::function<double(const std::vector<int>&, const std::vector<int>&)>;

inline std::vector<double> subset_scores(const std::vector<int>& preds,
                                         const std::vector<int>& golds,
                                         const MetricFn& metric, std::size_t k,
                                         std::uint64_t seed) {
  if (preds.size() != golds.size()) {
    throw std::invalid_argument("subset_scores: preds and golds differ in length");
  }
  if (k == 0) throw std::invalid_argument("subset_scores: k must be positive");
  if (preds.size() < k) {
    throw std::invalid_argument("subset_scores: need at least k = " + std::to_string(k) +
                                " items, got " + std::to_string(preds.size()));
  }
  std::vector<std::size_t> order(preds.size());
  std::iota(order.begin(), order.end(), 0);
  SplitMix64 rng(seed);
  rng.shuffle(order);

  const std::size_t base = preds.size() / k;
  const std::size_t extra = preds.size() % k;  // first `extra` chunks get one more
  std::vector<double> scores;
  scores.reserve(k);
  std::size_t pos = 0;
  for (std::size_t c = 0; c < k; ++c) {
    const std::size_t size = base + (c < extra ? 1 : 0);
    std::vector<int> p(size), g(size);
    for (std::size_t i = 0; i < size; ++i) {
      p[i] = preds[order[pos + i]];
      g[i] = golds[order[pos + i]];
    }
    pos += size;
    scores.push_back(metric(p, g));
  }
  return scores;
}

// Report annotation in the usual two-family style: * / ** for the first
// comparison family, dagger / double-dagger for the second.
inline std::string significance_marker(double p, int family = 0) {
  const bool strong = p < 0.01;
  const bool weak = p < 0.05;
  if (family == 0) return strong ? "**" : weak ? "*" : "";
  return strong ? "‡" : weak ? "†" : "";
}

}  // namespace fairmtl
