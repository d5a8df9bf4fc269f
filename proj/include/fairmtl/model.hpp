#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "fairmtl/aspects.hpp"
#include "fairmtl/features.hpp"
#include "fairmtl/rng.hpp"

namespace fairmtl {

// Softmax over two logits with the usual max-shift for stability.
inline std::array<double, 2> softmax2(double z0, double z1) {
  const double m = std::max(z0, z1);
  const double e0 = std::exp(z0 - m);
  const double e1 = std::exp(z1 - m);
  const double s = e0 + e1;
  return {e0 / s, e1 / s};
}

struct Prediction {
  std::array<double, 2> probs{0.5, 0.5};
  int label = 0;
};

// Per-task classification head: a single affine layer into a 2-way softmax.
struct TaskHead {
  std::vector<double> w;       // 2 x hidden, row-major
  std::array<double, 2> b{0.0, 0.0};
};

// Shared tanh encoder over hashed n-gram features plus one head per task.
// Immutable during inference; only the trainer mutates parameters.
struct MultitaskModel {
  std::uint32_t dim = 0;     // input feature dimension
  std::uint32_t hidden = 0;  // encoder width
  std::vector<double> w1;    // hidden x dim, row-major
  std::vector<double> b1;    // hidden
  std::map<AspectId, TaskHead> heads;
  NgramConfig ngrams;
  std::string model_id;
  std::map<std::string, std::string> metadata;  // mode, seed, config hash, ...

  std::size_t head_count() const { return heads.size(); }

  const TaskHead& head(AspectId task) const {
    auto it = heads.find(task);
    if (it == heads.end()) {
      throw std::invalid_argument("model has no head for task \"" +
                                  std::string(aspect_name(task)) + "\"");
    }
    return it->second;
  }
};

inline MultitaskModel init_model(const NgramConfig& ngrams, std::uint32_t hidden,
                                 const std::vector<AspectId>& tasks,
                                 std::uint64_t seed) {
  if (tasks.empty()) {
    throw std::invalid_argument("init_model: task list is empty");
  }
  // heads is a map, so a duplicate would silently collapse into one head and
  // shift every later head's init stream; reject it instead.
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    for (std::size_t j = i + 1; j < tasks.size(); ++j) {
      if (tasks[i] == tasks[j]) {
        throw std::invalid_argument("init_model: duplicate task \"" +
                                    std::string(aspect_name(tasks[i])) + "\"");
      }
    }
  }
  MultitaskModel m;
  m.dim = ngrams.dim;
  m.hidden = hidden;
  m.ngrams = ngrams;
  m.w1.resize(static_cast<std::size_t>(hidden) * ngrams.dim);
  m.b1.assign(hidden, 0.0);

  SplitMix64 enc_rng = SplitMix64(seed).derive(0x1);
  const double enc_scale = 0.5;
  for (double& w : m.w1) w = (enc_rng.next_double() * 2.0 - 1.0) * enc_scale;

  const double head_scale = 1.0 / std::sqrt(static_cast<double>(hidden));
  for (AspectId t : tasks) m.heads[t];  // create in sorted order
  std::uint64_t head_tag = 0x10;
  for (auto& [task, head] : m.heads) {
    SplitMix64 rng = SplitMix64(seed).derive(head_tag++);
    head.w.resize(2 * static_cast<std::size_t>(hidden));
    for (double& w : head.w) w = (rng.next_double() * 2.0 - 1.0) * head_scale;
  }
  return m;
}

// hidden = tanh(W1 x + b1); probs = softmax(Wh hidden + bh). The requested
// head is the only one touched; other heads cannot influence the result.
inline std::vector<double> encode(const MultitaskModel& m, const FeatureVector& x) {
  if (x.dim != m.dim) {
    throw std::invalid_argument("forward: feature dim " + std::to_string(x.dim) +
                                " does not match model dim " + std::to_string(m.dim));
  }
  std::vector<double> h(m.b1);
  for (const auto& [idx, val] : x.entries) {
    const double* col = m.w1.data() + idx;
    for (std::uint32_t r = 0; r < m.hidden; ++r) {
      h[r] += col[static_cast<std::size_t>(r) * m.dim] * val;
    }
  }
  for (double& v : h) v = std::tanh(v);
  return h;
}

inline Prediction head_predict(const TaskHead& head, const std::vector<double>& hidden) {
  const std::size_t n = hidden.size();
  double z0 = head.b[0], z1 = head.b[1];
  for (std::size_t i = 0; i < n; ++i) {
    z0 += head.w[i] * hidden[i];
    z1 += head.w[n + i] * hidden[i];
  }
  Prediction pred;
  pred.probs = softmax2(z0, z1);
  pred.label = pred.probs[1] > pred.probs[0] ? 1 : 0;  // ties go negative
  return pred;
}

inline Prediction forward(const MultitaskModel& m, const FeatureVector& x,
                          AspectId task) {
  return head_predict(m.head(task), encode(m, x));
}

// ---------------------------------------------------------------------------
// Serialization: a small versioned binary format. Parameters are written as
// raw IEEE-754 bits (little-endian), so save/load round-trips bit-exactly.

namespace detail {

constexpr char kModelMagic[9] = "FMTLMDL1";

inline void put_u32(std::ostream& out, std::uint32_t v) {
  char b[4] = {static_cast<char>(v), static_cast<char>(v >> 8),
               static_cast<char>(v >> 16), static_cast<char>(v >> 24)};
  out.write(b, 4);
}

inline std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

inline void put_f64(std::ostream& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>(bits >> (8 * i));
  out.write(b, 8);
}

inline double get_f64(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

inline void put_string(std::ostream& out, const std::string& s) {
  put_u32(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string get_string(std::istream& in) {
  const std::uint32_t n = get_u32(in);
  std::string s(n, '\0');
  in.read(s.data(), n);
  return s;
}

}  // namespace detail

inline void save_model(const MultitaskModel& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write model file: " + path);
  out.write(detail::kModelMagic, 8);
  detail::put_u32(out, m.dim);
  detail::put_u32(out, m.hidden);
  detail::put_string(out, "fnv1a64");
  detail::put_u32(out, m.ngrams.dim);
  detail::put_u32(out, m.ngrams.word_unigrams ? 1 : 0);
  detail::put_u32(out, m.ngrams.word_bigrams ? 1 : 0);
  detail::put_u32(out, m.ngrams.char_min);
  detail::put_u32(out, m.ngrams.char_max);
  detail::put_string(out, m.model_id);
  detail::put_u32(out, static_cast<std::uint32_t>(m.metadata.size()));
  for (const auto& [k, v] : m.metadata) {
    detail::put_string(out, k);
    detail::put_string(out, v);
  }
  detail::put_u32(out, static_cast<std::uint32_t>(m.heads.size()));
  for (const auto& [task, head] : m.heads) {
    detail::put_u32(out, static_cast<std::uint32_t>(task));
    for (double w : head.w) detail::put_f64(out, w);
    detail::put_f64(out, head.b[0]);
    detail::put_f64(out, head.b[1]);
  }
  for (double w : m.w1) detail::put_f64(out, w);
  for (double b : m.b1) detail::put_f64(out, b);
  if (!out) throw std::runtime_error("short write to model file: " + path);
}

inline MultitaskModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open model file: " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || !std::equal(magic, magic + 8, detail::kModelMagic)) {
    throw std::runtime_error("not a model file (bad magic): " + path);
  }
  MultitaskModel m;
  m.dim = detail::get_u32(in);
  m.hidden = detail::get_u32(in);
  const std::string hash_name = detail::get_string(in);
  if (hash_name != "fnv1a64") {
    throw std::runtime_error("unsupported feature hash \"" + hash_name + "\"");
  }
  m.ngrams.dim = detail::get_u32(in);
  m.ngrams.word_unigrams = detail::get_u32(in) != 0;
  m.ngrams.word_bigrams = detail::get_u32(in) != 0;
  m.ngrams.char_min = detail::get_u32(in);
  m.ngrams.char_max = detail::get_u32(in);
  m.model_id = detail::get_string(in);
  const std::uint32_t n_meta = detail::get_u32(in);
  for (std::uint32_t i = 0; i < n_meta; ++i) {
    std::string k = detail::get_string(in);
    m.metadata[k] = detail::get_string(in);
  }
  const std::uint32_t n_heads = detail::get_u32(in);
  for (std::uint32_t i = 0; i < n_heads; ++i) {
    const std::uint32_t raw = detail::get_u32(in);
    if (raw >= kAspectCount) throw std::runtime_error("bad head id in model file");
    TaskHead head;
    head.w.resize(2 * static_cast<std::size_t>(m.hidden));
    for (double& w : head.w) w = detail::get_f64(in);
    head.b[0] = detail::get_f64(in);
    head.b[1] = detail::get_f64(in);
    m.heads[static_cast<AspectId>(raw)] = std::move(head);
  }
  m.w1.resize(static_cast<std::size_t>(m.hidden) * m.dim);
  for (double& w : m.w1) w = detail::get_f64(in);
  m.b1.resize(m.hidden);
  for (double& b : m.b1) b = detail::get_f64(in);
  if (!in) throw std::runtime_error("truncated model file: " + path);
  return m;
}

}  // namespace fairmtl
