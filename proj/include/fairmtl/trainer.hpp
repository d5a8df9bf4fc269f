#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "fairmtl/aspects.hpp"
#include "fairmtl/features.hpp"
#include "fairmtl/model.hpp"
#include "fairmtl/rng.hpp"

namespace fairmtl {

// Probabilities are clamped away from zero before the log so a saturated
// softmax cannot produce inf.
constexpr double kLogClamp = 1e-12;

inline double cross_entropy(const std::array<double, 2>& probs, int label,
                            double weight = 1.0) {
  if (label != 0 && label != 1) {
    throw std::invalid_argument("cross_entropy: label must be 0 or 1");
  }
  const double p = std::max(probs[static_cast<std::size_t>(label)], kLogClamp);
  return -std::log(p) * weight;
}

// Inverse-frequency weights: w_c = (n0 + n1) / (2 n_c). A balanced pool gets
// {1, 1}; rarer classes get proportionally larger weights.
inline std::array<double, 2> class_weights_from_counts(std::uint64_t n0,
                                                       std::uint64_t n1) {
  if (n0 == 0 || n1 == 0) {
    throw std::invalid_argument(
        "class_weights_from_counts: both classes must be present");
  }
  const double total = static_cast<double>(n0 + n1);
  return {total / (2.0 * static_cast<double>(n0)),
          total / (2.0 * static_cast<double>(n1))};
}

struct TrainExample {
  std::size_t feature = 0;  // index into the shared featurized corpus
  int label = 0;
  double weight = 1.0;
};

struct TaskPool {
  AspectId task = AspectId::kOffensive;
  std::vector<TrainExample> examples;
};

struct TrainConfig {
  std::uint32_t batch_size = 16;
  std::uint32_t epochs = 3;
  std::uint64_t steps = 0;  // nonzero overrides the epoch-derived step count
  double lr = 0.5;
  std::uint64_t seed = 1;
  bool record_trace = true;
};

struct StepRecord {
  AspectId task;
  double loss;
};

struct TrainStats {
  std::vector<StepRecord> trace;
  std::map<AspectId, std::uint64_t> head_updates;
  std::uint64_t encoder_updates = 0;
  std::uint64_t steps_per_epoch = 0;
  std::uint64_t total_steps = 0;
};

// Mean weighted loss over a batch: (1/n) sum_i w_i * ce_i. Doubling a
// sample's weight therefore exactly doubles its gradient contribution.
// The finite-difference checks in the test suite re-evaluate this function.
inline double batch_loss(const MultitaskModel& model,
                         const std::vector<FeatureVector>& features,
                         const std::vector<TrainExample>& batch, AspectId task) {
  if (batch.empty()) throw std::invalid_argument("batch_loss: empty batch");
  const TaskHead& head = model.head(task);
  double total = 0.0;
  for (const TrainExample& ex : batch) {
    const Prediction pred = head_predict(head, encode(model, features[ex.feature]));
    total += cross_entropy(pred.probs, ex.label, ex.weight);
  }
  return total / static_cast<double>(batch.size());
}

// Gradients of batch_loss with respect to the encoder and the active head.
// Encoder weight entries are sparse (only columns touched by the batch);
// everything else, including other heads, has an exactly-zero gradient.
struct Gradients {
  std::map<std::size_t, double> w1;  // keyed row * dim + col
  std::vector<double> b1;
  std::vector<double> head_w;  // 2 x hidden, row-major
  std::array<double, 2> head_b{0.0, 0.0};
  double loss = 0.0;
};

inline Gradients batch_gradients(const MultitaskModel& model,
                                 const std::vector<FeatureVector>& features,
                                 const std::vector<TrainExample>& batch,
                                 AspectId task) {
  if (batch.empty()) throw std::invalid_argument("batch_gradients: empty batch");
  const TaskHead& head = model.head(task);
  const std::uint32_t H = model.hidden;
  const double inv_n = 1.0 / static_cast<double>(batch.size());

  Gradients g;
  g.b1.assign(H, 0.0);
  g.head_w.assign(2 * static_cast<std::size_t>(H), 0.0);

  for (const TrainExample& ex : batch) {
    const FeatureVector& x = features[ex.feature];
    const std::vector<double> h = encode(model, x);
    const Prediction pred = head_predict(head, h);
    g.loss += cross_entropy(pred.probs, ex.label, ex.weight) * inv_n;

    // dL/dz_c = (p_c - [c == y]) * w / n for softmax + cross-entropy
    std::array<double, 2> dz;
    for (int c = 0; c < 2; ++c) {
      dz[c] = (pred.probs[c] - (c == ex.label ? 1.0 : 0.0)) * ex.weight * inv_n;
    }
    g.head_b[0] += dz[0];
    g.head_b[1] += dz[1];
    std::vector<double> dpre(H);
    for (std::uint32_t r = 0; r < H; ++r) {
      g.head_w[r] += dz[0] * h[r];
      g.head_w[H + r] += dz[1] * h[r];
      const double dh = head.w[r] * dz[0] + head.w[H + r] * dz[1];
      dpre[r] = dh * (1.0 - h[r] * h[r]);  // tanh'
      g.b1[r] += dpre[r];
    }
    for (const auto& [idx, val] : x.entries) {
      for (std::uint32_t r = 0; r < H; ++r) {
        g.w1[static_cast<std::size_t>(r) * model.dim + idx] += dpre[r] * val;
      }
    }
  }
  return g;
}

inline void apply_gradients(MultitaskModel& model, AspectId task,
                            const Gradients& g, double lr) {
  TaskHead& head = model.heads.at(task);
  for (const auto& [key, grad] : g.w1) model.w1[key] -= lr * grad;
  for (std::uint32_t r = 0; r < model.hidden; ++r) model.b1[r] -= lr * g.b1[r];
  for (std::size_t i = 0; i < head.w.size(); ++i) head.w[i] -= lr * g.head_w[i];
  head.b[0] -= lr * g.head_b[0];
  head.b[1] -= lr * g.head_b[1];
}

namespace detail {

// Cycles through one task's pool in shuffled order. Each pass visits every
// example once; the final batch of a pass may be short.
class BatchStream {
 public:
  BatchStream(std::size_t pool_size, std::uint32_t batch_size, SplitMix64 rng)
      : batch_size_(batch_size), rng_(rng) {
    perm_.resize(pool_size);
    for (std::size_t i = 0; i < pool_size; ++i) perm_[i] = i;
    rng_.shuffle(perm_);
  }

  std::vector<std::size_t> next() {
    if (pos_ == perm_.size()) {
      rng_.shuffle(perm_);
      pos_ = 0;
    }
    const std::size_t take = std::min<std::size_t>(batch_size_, perm_.size() - pos_);
    std::vector<std::size_t> out(perm_.begin() + static_cast<std::ptrdiff_t>(pos_),
                                 perm_.begin() + static_cast<std::ptrdiff_t>(pos_ + take));
    pos_ += take;
    return out;
  }

 private:
  std::vector<std::size_t> perm_;
  std::size_t pos_ = 0;
  std::uint32_t batch_size_;
  SplitMix64 rng_;
};

}  // namespace detail

// The fixed alternation order: step i trains tasks[i mod |tasks|].
inline std::vector<AspectId> round_robin_schedule(const std::vector<AspectId>& tasks,
                                                  std::uint64_t steps) {
  if (tasks.empty()) throw std::invalid_argument("round_robin_schedule: no tasks");
  std::vector<AspectId> out;
  out.reserve(steps);
  for (std::uint64_t i = 0; i < steps; ++i) out.push_back(tasks[i % tasks.size()]);
  return out;
}

// Round-robin multitask training. Tasks alternate in the order the pools
// are given; every step updates the shared encoder plus exactly one head.
// An epoch is long enough for the largest pool to be visited once:
//   steps_per_epoch = n_tasks * max_t ceil(|pool_t| / batch_size).
inline TrainStats train(MultitaskModel& model,
                        const std::vector<FeatureVector>& features,
                        const std::vector<TaskPool>& pools,
                        const TrainConfig& cfg) {
  if (pools.empty()) throw std::invalid_argument("train: no task pools");
  if (cfg.batch_size == 0) throw std::invalid_argument("train: batch_size must be positive");

  std::vector<AspectId> order;
  std::vector<detail::BatchStream> streams;
  std::uint64_t max_batches = 0;
  for (const TaskPool& p : pools) {
    if (p.examples.empty()) {
      throw std::invalid_argument("train: empty pool for task \"" +
                                  std::string(aspect_name(p.task)) + "\"");
    }
    if (std::find(order.begin(), order.end(), p.task) != order.end()) {
      throw std::invalid_argument("train: duplicate pool for task \"" +
                                  std::string(aspect_name(p.task)) + "\"");
    }
    model.head(p.task);  // throws if the model lacks this head
    order.push_back(p.task);
    streams.emplace_back(p.examples.size(), cfg.batch_size,
                         SplitMix64(cfg.seed).derive(0x40 + static_cast<std::uint64_t>(p.task)));
    max_batches = std::max(max_batches,
                           (p.examples.size() + cfg.batch_size - 1) / cfg.batch_size);
  }

  TrainStats stats;
  stats.steps_per_epoch = order.size() * max_batches;
  stats.total_steps = cfg.steps != 0 ? cfg.steps : stats.steps_per_epoch * cfg.epochs;
  for (AspectId t : order) stats.head_updates[t] = 0;

  std::vector<TrainExample> batch;
  for (std::uint64_t step = 0; step < stats.total_steps; ++step) {
    const std::size_t slot = step % order.size();
    const AspectId task = order[slot];
    batch.clear();
    for (std::size_t i : streams[slot].next()) batch.push_back(pools[slot].examples[i]);
    const Gradients g = batch_gradients(model, features, batch, task);
    if (!std::isfinite(g.loss)) {
      throw std::runtime_error("train: non-finite loss at step " + std::to_string(step));
    }
    apply_gradients(model, task, g, cfg.lr);
    ++stats.head_updates[task];
    ++stats.encoder_updates;
    if (cfg.record_trace) stats.trace.push_back({task, g.loss});
  }
  return stats;
}

// ---------------------------------------------------------------------------
// Finite-difference harness. Walks every parameter of a small model,
// compares the analytic gradient against a central difference of batch_loss
// and throws naming the first parameter that disagrees. Inactive heads must
// come out exactly zero on both sides.

struct GradCheckReport {
  std::size_t params_checked = 0;
  double max_rel_err = 0.0;
};

inline GradCheckReport check_gradients(MultitaskModel model,
                                       const std::vector<FeatureVector>& features,
                                       const std::vector<TrainExample>& batch,
                                       AspectId task, double step = 1e-5,
                                       double tol = 1e-4) {
  const Gradients g = batch_gradients(model, features, batch, task);
  GradCheckReport report;

  auto probe = [&](double* param, double analytic, const std::string& name) {
    const double saved = *param;
    *param = saved + step;
    const double up = batch_loss(model, features, batch, task);
    *param = saved - step;
    const double down = batch_loss(model, features, batch, task);
    *param = saved;
    const double fd = (up - down) / (2.0 * step);
    const double rel = std::fabs(analytic - fd) / std::max(1.0, std::fabs(fd));
    if (rel > tol) {
      throw std::runtime_error("gradient check failed at " + name + ": analytic " +
                               std::to_string(analytic) + " vs finite-diff " +
                               std::to_string(fd));
    }
    report.max_rel_err = std::max(report.max_rel_err, rel);
    ++report.params_checked;
  };

  for (std::uint32_t r = 0; r < model.hidden; ++r) {
    for (std::uint32_t c = 0; c < model.dim; ++c) {
      const std::size_t key = static_cast<std::size_t>(r) * model.dim + c;
      const auto it = g.w1.find(key);
      probe(&model.w1[key], it == g.w1.end() ? 0.0 : it->second,
            "W1[" + std::to_string(r) + "," + std::to_string(c) + "]");
    }
    probe(&model.b1[r], g.b1[r], "b1[" + std::to_string(r) + "]");
  }
  for (auto& [head_task, head] : model.heads) {
    const bool active = head_task == task;
    const std::string prefix = "head " + std::string(aspect_name(head_task));
    for (std::size_t i = 0; i < head.w.size(); ++i) {
      probe(&head.w[i], active ? g.head_w[i] : 0.0,
            prefix + " w[" + std::to_string(i) + "]");
    }
    for (int c = 0; c < 2; ++c) {
      probe(&head.b[static_cast<std::size_t>(c)], active ? g.head_b[static_cast<std::size_t>(c)] : 0.0,
            prefix + " b[" + std::to_string(c) + "]");
    }
  }
  return report;
}

}  // namespace fairmtl
