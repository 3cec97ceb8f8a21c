#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>
#include <vector>

#include "enn/data.hpp"
#include "enn/network.hpp"
#include "enn/optim.hpp"
#include "enn/rng.hpp"

namespace enn {

enum class OptimizerKind { sgd, adam };

struct TrainConfig {
  static constexpr int kFullBatch = 0;

  int epochs = 50;
  int batch_size = 64;  // kFullBatch = whole dataset per step
  LearningRates rates{1e-3, 1e-3};
  OptimizerKind optimizer = OptimizerKind::sgd;
  std::uint64_t seed = 1;
  int eval_every = 5;
  int threads = 1;
};

struct MetricRecord {
  int epoch = 0;
  double mse = 0.0;
  double accuracy = std::numeric_limits<double>::quiet_NaN();  // NaN for regression
};

struct Metrics {
  std::vector<MetricRecord> records;

  const MetricRecord& final() const { return records.back(); }
};

// epoch,mse,accuracy rows; the accuracy cell is left empty when unset.
inline void write_metrics_csv(const Metrics& metrics, const std::string& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("write_metrics_csv: cannot open '" + path + "'");
  f << "epoch,mse,accuracy\n";
  for (const MetricRecord& r : metrics.records) {
    f << r.epoch << "," << format_g17(r.mse) << ",";
    if (!std::isnan(r.accuracy)) f << format_g17(r.accuracy);
    f << "\n";
  }
  if (!f) throw std::runtime_error("write_metrics_csv: write failed for '" + path + "'");
}

inline double evaluate_mse(const Network& net, const Dataset& data) {
  Workspace ws;
  Vector x(data.input_dim());
  double acc = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = data.inputs(i, j);
    const double err = data.targets[i] - forward_pass(net, x, ws, false);
    acc += err * err;
  }
  return acc / static_cast<double>(data.size());
}

namespace detail {

inline void require_binary_targets(const Dataset& data, const char* who) {
  for (double y : data.targets)
    if (y != 1.0 && y != -1.0)
      throw std::invalid_argument(std::string(who) + ": targets must be -1 or +1");
}

}  // namespace detail

inline double evaluate_accuracy(const Network& net, const Dataset& data) {
  detail::require_binary_targets(data, "evaluate_accuracy");
  Workspace ws;
  Vector x(data.input_dim());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = data.inputs(i, j);
    const int pred = forward_pass(net, x, ws, false) >= 0.0 ? 1 : -1;
    if (static_cast<double>(pred) == data.targets[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(data.size());
}

namespace detail {

// Mean gradient over data[indices[begin..end)], accumulated per shard and
// reduced in shard order so the result depends only on the thread count.
// Returns the mean squared error over the slice as a byproduct.
inline double batch_gradient(const Network& net, const Dataset& data,
                             const std::vector<std::size_t>& indices, std::size_t begin,
                             std::size_t end, int threads, Gradients& out,
                             std::vector<Workspace>& ws_pool,
                             std::vector<Gradients>& grad_pool) {
  const std::size_t count = end - begin;
  int t = threads < 1 ? 1 : threads;
  if (static_cast<std::size_t>(t) > count) t = static_cast<int>(count);

  while (ws_pool.size() < static_cast<std::size_t>(t)) ws_pool.emplace_back();
  while (grad_pool.size() < static_cast<std::size_t>(t)) grad_pool.push_back(make_gradients(net));

  std::vector<double> losses(static_cast<std::size_t>(t), 0.0);
  auto run_shard = [&](int shard) {
    const std::size_t lo = begin + count * static_cast<std::size_t>(shard) / t;
    const std::size_t hi = begin + count * (static_cast<std::size_t>(shard) + 1) / t;
    Workspace& ws = ws_pool[static_cast<std::size_t>(shard)];
    Gradients& g = grad_pool[static_cast<std::size_t>(shard)];
    zero_gradients(g);
    Vector x(data.input_dim());
    double loss = 0.0;
    for (std::size_t k = lo; k < hi; ++k) {
      const std::size_t i = indices[k];
      for (std::size_t j = 0; j < x.size(); ++j) x[j] = data.inputs(i, j);
      const double yhat = backward_pass(net, x, data.targets[i], ws, g, true);
      const double err = data.targets[i] - yhat;
      loss += err * err;
    }
    losses[static_cast<std::size_t>(shard)] = loss;
  };

  if (t == 1) {
    run_shard(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(t));
    for (int shard = 0; shard < t; ++shard) pool.emplace_back(run_shard, shard);
    for (std::thread& th : pool) th.join();
  }

  zero_gradients(out);
  double loss = 0.0;
  for (int shard = 0; shard < t; ++shard) {
    add_gradients(out, grad_pool[static_cast<std::size_t>(shard)]);
    loss += losses[static_cast<std::size_t>(shard)];
  }
  scale_gradients(out, 1.0 / static_cast<double>(count));
  return loss / static_cast<double>(count);
}

inline void validate_train_config(const TrainConfig& cfg) {
  if (cfg.epochs < 1) throw std::invalid_argument("train: epochs must be >= 1");
  if (cfg.batch_size < 0) throw std::invalid_argument("train: invalid batch size");
  if (cfg.eval_every < 1) throw std::invalid_argument("train: eval_every must be >= 1");
  validate_rates(cfg.rates);
}

}  // namespace detail

// Shuffled minibatch training on the mean squared error. Gradients are
// averaged within each batch. Metric rows are written every eval_every
// epochs (and for the final epoch) against eval_data when given, else the
// training data.
inline Metrics train_classification(Network& net, const Dataset& data, const TrainConfig& cfg,
                                    const Dataset* eval_data = nullptr) {
  detail::validate_train_config(cfg);
  if (data.size() == 0) throw std::invalid_argument("train_classification: empty dataset");
  detail::require_binary_targets(data, "train_classification");

  const std::size_t batch =
      cfg.batch_size == TrainConfig::kFullBatch ? data.size()
                                                : static_cast<std::size_t>(cfg.batch_size);
  Rng rng(cfg.seed);
  std::vector<std::size_t> indices(data.size());
  std::iota(indices.begin(), indices.end(), std::size_t{0});

  Gradients grads = make_gradients(net);
  std::vector<Workspace> ws_pool;
  std::vector<Gradients> grad_pool;
  AdamState adam = make_adam_state(net);

  Metrics metrics;
  const Dataset& eval = eval_data ? *eval_data : data;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    rng.shuffle(indices);
    for (std::size_t start = 0; start < data.size(); start += batch) {
      const std::size_t stop = std::min(data.size(), start + batch);
      detail::batch_gradient(net, data, indices, start, stop, cfg.threads, grads, ws_pool,
                             grad_pool);
      if (cfg.optimizer == OptimizerKind::sgd)
        sgd_step(net, grads, cfg.rates);
      else
        adam_step(net, grads, cfg.rates, adam);
    }
    if (epoch % cfg.eval_every == 0 || epoch == cfg.epochs) {
      MetricRecord rec;
      rec.epoch = epoch;
      rec.mse = evaluate_mse(net, eval);
      rec.accuracy = evaluate_accuracy(net, eval);
      metrics.records.push_back(rec);
    }
  }
  return metrics;
}

// Full-batch regression on the image's pixel dataset; one optimizer step per
// epoch with the gradient averaged over every pixel.
inline Metrics train_inr(Network& net, const ImageGrid& img, const TrainConfig& cfg) {
  detail::validate_train_config(cfg);
  if (cfg.batch_size != TrainConfig::kFullBatch)
    throw std::invalid_argument("train_inr: full-batch training required");
  const Dataset data = image_to_dataset(img);

  std::vector<std::size_t> indices(data.size());
  std::iota(indices.begin(), indices.end(), std::size_t{0});

  Gradients grads = make_gradients(net);
  std::vector<Workspace> ws_pool;
  std::vector<Gradients> grad_pool;
  AdamState adam = make_adam_state(net);

  Metrics metrics;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    detail::batch_gradient(net, data, indices, 0, data.size(), cfg.threads, grads, ws_pool,
                           grad_pool);
    if (cfg.optimizer == OptimizerKind::adam)
      adam_step(net, grads, cfg.rates, adam);
    else
      sgd_step(net, grads, cfg.rates);
    if (epoch % cfg.eval_every == 0 || epoch == cfg.epochs) {
      MetricRecord rec;
      rec.epoch = epoch;
      rec.mse = evaluate_mse(net, data);
      metrics.records.push_back(rec);
    }
  }
  return metrics;
}

}  // namespace enn
