// Copyright 2026 The QMTL Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qmtl/data.hpp"
#include "qmtl/errors.hpp"
#include "qmtl/loss_gradient.hpp"
#include "qmtl/losses.hpp"
#include "qmtl/metrics.hpp"
#include "qmtl/models.hpp"
#include "qmtl/optim.hpp"
#include "qmtl/random.hpp"

namespace qmtl {

enum class Protocol : std::uint8_t { TaskSampled, ParallelWeighted, MaskedParallel };

inline std::string_view protocol_name(Protocol p) {
  switch (p) {
    case Protocol::TaskSampled: return "task_sampled";
    case Protocol::ParallelWeighted: return "parallel_weighted";
    case Protocol::MaskedParallel: return "masked_parallel";
  }
  return "?";
}

inline Protocol parse_protocol(std::string_view s) {
  if (s == "task_sampled") return Protocol::TaskSampled;
  if (s == "parallel_weighted") return Protocol::ParallelWeighted;
  if (s == "masked_parallel") return Protocol::MaskedParallel;
  throw ConfigError("unknown protocol '" + std::string(s) + "'");
}

struct TrainConfig {
  OptimizerConfig optim;
  std::size_t epochs = 200;
  std::size_t batch_size = 32;
  Protocol protocol = Protocol::MaskedParallel;
  /// TaskSampled: at most this many batches per task per epoch (0 = no cap).
  std::size_t task_cap = 0;
  bool use_scheduler = true;
  PlateauConfig plateau;
  /// Stop after this many evaluations without improvement (0 = never).
  std::size_t early_stop_patience = 5;
  /// Evaluate every this many updates; 0 = once per epoch.
  std::size_t eval_every = 0;
  std::uint64_t seed = 0;

  void validate() const {
    optim.validate();
    if (epochs < 1) throw ConfigError("epochs must be positive");
    if (batch_size < 1) throw ConfigError("batch_size must be positive");
    if (!(plateau.factor > 0 && plateau.factor < 1)) throw ConfigError("plateau factor must lie in (0, 1)");
  }
};

struct TaskEval {
  std::string name;
  std::vector<std::pair<Metric, MetricValue>> metrics;
  double loss = 0.0;

  double primary() const { return metrics.empty() ? 0.0 : metrics.front().second.value; }
  double metric(Metric m) const {
    for (const auto& [k, v] : metrics) {
      if (k == m) return v.value;
    }
    throw ConfigError("metric " + std::string(metric_name(m)) + " was not computed for " + name);
  }
};

struct EvalResult {
  std::vector<TaskEval> tasks;
  /// Mean of the per-task primary metrics.
  double score = 0.0;
};

struct HistoryRecord {
  std::size_t step = 0;
  std::size_t epoch = 0;
  double lr = 0.0;
  EvalResult eval;
  double wall_time = 0.0;
};

struct TrainResult {
  std::vector<double> best_params;
  std::vector<double> final_params;
  double best_score = 0.0;
  std::size_t best_step = 0;
  std::vector<HistoryRecord> history;
  /// Training loss of every update, in order.
  std::vector<double> train_losses;
  bool stopped_early = false;
};

namespace detail {

inline std::vector<double> softmax(std::span<const double> z) {
  std::vector<double> p(z.begin(), z.end());
  const double m = *std::max_element(p.begin(), p.end());
  double s = 0;
  for (auto& v : p) s += (v = std::exp(v - m));
  for (auto& v : p) v /= s;
  return p;
}

inline void check_tasks(const HeadModel& model, const MultiTaskBatch& data,
                        const std::vector<TaskSpec>& tasks) {
  if (data.size() == 0) throw ConfigError("dataset is empty");
  if (data.dim != model.feature_dim()) {
    throw DimensionError("dataset has " + std::to_string(data.dim) + " features, model expects " +
                         std::to_string(model.feature_dim()));
  }
  if (data.num_tasks() != tasks.size()) throw DimensionError("dataset label columns do not match tasks");
  const auto sizes = model.output_sizes();
  if (sizes.size() != tasks.size()) throw DimensionError("model head count does not match tasks");
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    tasks[t].validate();
    if (sizes[t] != tasks[t].num_outputs()) {
      throw DimensionError("task '" + tasks[t].name + "' needs " + std::to_string(tasks[t].num_outputs()) +
                           " logits, head has " + std::to_string(sizes[t]));
    }
    if (data.labels[t].size() != data.size()) throw DimensionError("label column length mismatch");
  }
}

}  // namespace detail

/// Per-task batch counts after applying the TaskSampled cap (0 = no cap).
inline std::vector<std::size_t> capped_batch_counts(std::span<const std::size_t> counts, std::size_t cap) {
  std::vector<std::size_t> out(counts.begin(), counts.end());
  if (cap > 0) {
    for (auto& c : out) c = std::min(c, cap);
  }
  return out;
}

/// Metrics and mean loss of every task on `data`. Hard predictions: logit > 0
/// for binary, argmax for multiclass, the raw value for regression. Tasks
/// with binarized evaluation treat label 0 as uncertain (dropped), 1 as
/// negative and 2 as positive.
inline EvalResult evaluate_model(const HeadModel& model, std::span<const double> params,
                                 const MultiTaskBatch& data, const std::vector<TaskSpec>& tasks,
                                 const EvalMode& mode = {}, std::uint64_t seed = 0) {
  detail::check_tasks(model, data, tasks);
  const std::size_t T = tasks.size();
  const std::size_t N = data.size();
  std::vector<std::vector<double>> preds(T, std::vector<double>(N, 0.0));
  std::vector<double> loss_sum(T, 0.0);
  std::vector<std::size_t> loss_n(T, 0);
  for (std::size_t i = 0; i < N; ++i) {
    const auto logits = mode.exact() ? model.forward(params, data.row(i))
                                     : model.forward(params, data.row(i), mode, derive_seed(seed, i));
    for (std::size_t t = 0; t < T; ++t) {
      const auto& task = tasks[t];
      const auto& z = logits[t];
      const auto res = task_loss(task.kind, z, data.labels[t][i], task.loss);
      if (!res.skipped) {
        loss_sum[t] += res.value;
        ++loss_n[t];
      }
      if (task.kind == TaskKind::Binary) {
        preds[t][i] = z[0] > 0 ? 1.0 : 0.0;
      } else if (task.kind == TaskKind::Regression) {
        preds[t][i] = z[0];
      } else if (task.binarize_eval) {
        const auto p = detail::softmax(z);
        preds[t][i] = binarize_3class(p[1], p[2]) >= 0.5 ? 1.0 : 0.0;
      } else {
        preds[t][i] = static_cast<double>(std::max_element(z.begin(), z.end()) - z.begin());
      }
    }
  }

  EvalResult out;
  for (std::size_t t = 0; t < T; ++t) {
    const auto& task = tasks[t];
    TaskEval te;
    te.name = task.name;
    te.loss = loss_n[t] ? loss_sum[t] / static_cast<double>(loss_n[t]) : 0.0;
    std::vector<double> labels = data.labels[t];
    std::size_t k = task.kind == TaskKind::Multiclass ? task.classes : 2;
    if (task.binarize_eval) {
      for (auto& y : labels) {
        if (is_missing(y)) continue;
        y = y == 0.0 ? kMissingLabel : y - 1.0;
      }
      k = 2;
    }
    std::vector<Metric> ms = task.metrics;
    if (ms.empty()) ms.push_back(task.primary_metric());
    for (auto m : ms) te.metrics.emplace_back(m, compute_metric(m, preds[t], labels, k));
    out.score += te.primary();
    out.tasks.push_back(std::move(te));
  }
  if (T > 0) out.score /= static_cast<double>(T);
  return out;
}

/// Trains `model` from `init` on `train`, evaluating on `val`. The returned
/// best parameters are those of the highest-scoring evaluation.
inline TrainResult train(const HeadModel& model, std::vector<double> init, const MultiTaskBatch& train_set,
                         const MultiTaskBatch& val_set, const std::vector<TaskSpec>& tasks,
                         const TrainConfig& cfg) {
  cfg.validate();
  detail::check_tasks(model, train_set, tasks);
  detail::check_tasks(model, val_set, tasks);
  if (init.size() != model.num_params()) throw DimensionError("initial parameter vector has wrong length");
  if (cfg.protocol == Protocol::ParallelWeighted && train_set.any_missing()) {
    throw ConfigError("parallel_weighted protocol requires fully labelled data; use masked_parallel");
  }

  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t T = tasks.size();
  const std::size_t N = train_set.size();
  const auto classes = model.param_classes();
  Rng shuffle_rng(derive_seed(cfg.seed, 11));
  Rng task_rng(derive_seed(cfg.seed, 12));

  TrainResult res;
  res.final_params = std::move(init);
  auto& params = res.final_params;
  OptimizerState state(params.size());
  OptimizerConfig optim = cfg.optim;
  PlateauScheduler scheduler(optim.lr, cfg.plateau);
  res.best_score = -std::numeric_limits<double>::infinity();
  std::size_t bad_evals = 0;
  std::size_t step = 0;
  bool stop = false;

  auto evaluate_now = [&](std::size_t epoch) {
    HistoryRecord rec;
    rec.step = step;
    rec.epoch = epoch;
    rec.lr = optim.lr;
    rec.eval = evaluate_model(model, params, val_set, tasks);
    rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const double score = rec.eval.score;
    res.history.push_back(std::move(rec));
    if (!std::isfinite(score)) throw NonFiniteError("validation score is not finite at step " + std::to_string(step));
    if (score > res.best_score) {
      res.best_score = score;
      res.best_step = step;
      res.best_params = params;
      bad_evals = 0;
    } else if (cfg.early_stop_patience > 0 && ++bad_evals >= cfg.early_stop_patience) {
      stop = true;
      res.stopped_early = true;
    }
    if (cfg.use_scheduler) optim.lr = scheduler.step(score);
  };

  auto update = [&](std::span<const std::size_t> rows, const std::vector<bool>& active, std::size_t epoch) {
    auto lg = loss_gradient(model, params, train_set, rows, tasks, active);
    optimizer_step(state, params, lg.grad, classes, optim);
    res.train_losses.push_back(lg.loss);
    ++step;
    if (cfg.eval_every > 0 && step % cfg.eval_every == 0) evaluate_now(epoch);
  };

  for (std::size_t epoch = 1; epoch <= cfg.epochs && !stop; ++epoch) {
    if (cfg.protocol == Protocol::TaskSampled) {
      std::vector<std::vector<std::size_t>> rows(T);
      std::vector<std::size_t> counts(T);
      for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t i = 0; i < N; ++i) {
          if (!is_missing(train_set.labels[t][i])) rows[t].push_back(i);
        }
        shuffle(std::span<std::size_t>(rows[t]), shuffle_rng);
        counts[t] = (rows[t].size() + cfg.batch_size - 1) / cfg.batch_size;
      }
      auto remaining = capped_batch_counts(counts, cfg.task_cap);
      std::vector<std::size_t> next(T, 0);
      std::size_t total = std::accumulate(remaining.begin(), remaining.end(), std::size_t{0});
      while (total > 0 && !stop) {
        std::size_t pick = uniform_index(task_rng, total);
        std::size_t t = 0;
        while (pick >= remaining[t]) pick -= remaining[t++];
        const std::size_t b = next[t]++;
        --remaining[t];
        --total;
        const std::size_t lo = b * cfg.batch_size;
        const std::size_t hi = std::min(lo + cfg.batch_size, rows[t].size());
        std::vector<bool> active(T, false);
        active[t] = true;
        update(std::span<const std::size_t>(rows[t]).subspan(lo, hi - lo), active, epoch);
      }
    } else {
      std::vector<std::size_t> order(N);
      std::iota(order.begin(), order.end(), std::size_t{0});
      shuffle(std::span<std::size_t>(order), shuffle_rng);
      for (std::size_t lo = 0; lo < N && !stop; lo += cfg.batch_size) {
        const std::size_t hi = std::min(lo + cfg.batch_size, N);
        const auto batch = std::span<const std::size_t>(order).subspan(lo, hi - lo);
        bool labelled = false;
        for (std::size_t t = 0; t < T && !labelled; ++t) {
          for (auto r : batch) labelled |= !is_missing(train_set.labels[t][r]);
        }
        if (!labelled) continue;
        update(batch, {}, epoch);
      }
    }
    if (cfg.eval_every == 0 && !stop) evaluate_now(epoch);
  }
  if (res.best_params.empty()) res.best_params = params;
  return res;
}

}  // namespace qmtl
