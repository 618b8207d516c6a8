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
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qmtl/errors.hpp"
#include "qmtl/losses.hpp"
#include "qmtl/metrics.hpp"
#include "qmtl/random.hpp"

namespace qmtl {

struct TaskSpec {
  std::string name;
  TaskKind kind = TaskKind::Binary;
  /// K for multiclass, 2 for binary, 1 for regression.
  std::size_t classes = 2;
  double lambda = 1.0;
  /// First entry is the primary (model-selection) metric.
  std::vector<Metric> metrics;
  LossOptions loss;
  /// Score a (uncertain, negative, positive) 3-class head as binary.
  bool binarize_eval = false;

  std::size_t num_outputs() const { return num_logits(kind, classes); }

  void validate() const {
    if (kind == TaskKind::Multiclass && classes < 2) {
      throw ConfigError("task '" + name + "': multiclass needs at least 2 classes");
    }
    if (lambda < 0) throw ConfigError("task '" + name + "': lambda must be non-negative");
    if (binarize_eval && (kind != TaskKind::Multiclass || classes != 3)) {
      throw ConfigError("task '" + name + "': binarized evaluation needs a 3-class task");
    }
  }

  Metric primary_metric() const {
    if (!metrics.empty()) return metrics.front();
    return kind == TaskKind::Regression ? Metric::Spearman : Metric::Accuracy;
  }
};

/// Row-major features with one label column per task.
struct MultiTaskBatch {
  std::size_t dim = 0;
  std::vector<double> features;
  std::vector<std::vector<double>> labels;

  std::size_t size() const noexcept { return dim == 0 ? 0 : features.size() / dim; }
  std::size_t num_tasks() const noexcept { return labels.size(); }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(features).subspan(i * dim, dim);
  }
  bool any_missing() const {
    for (const auto& col : labels) {
      for (double v : col) {
        if (is_missing(v)) return true;
      }
    }
    return false;
  }
};

struct SyntheticTask {
  TaskKind kind = TaskKind::Binary;
  std::size_t classes = 2;
  /// Features this task's teacher reads; empty falls back to the global set.
  std::vector<std::size_t> features;
};

struct SyntheticSpec {
  std::size_t dim = 12;
  std::vector<SyntheticTask> tasks;
  std::size_t n_train = 512;
  std::size_t n_val = 256;
  std::uint64_t teacher_seed = 0;
  /// Probability that a class label is replaced by a different class.
  double noise_level = 0.0;
  /// Probability that an individual (task, sample) label is MISSING.
  double missing_rate = 0.0;
  /// Label each sample for exactly one task, chosen uniformly.
  bool one_task_per_sample = false;
  /// Features the teachers read; empty means all of them.
  std::vector<std::size_t> teacher_features;

  void validate() const {
    if (dim < 1) throw ConfigError("synthetic feature dimension must be positive");
    if (n_train < 1 || n_val < 1) throw ConfigError("synthetic split sizes must be positive");
    if (!(noise_level >= 0 && noise_level < 0.5)) throw ConfigError("noise_level must lie in [0, 0.5)");
    if (!(missing_rate >= 0 && missing_rate < 1)) throw ConfigError("missing_rate must lie in [0, 1)");
    for (auto f : teacher_features) {
      if (f >= dim) throw ConfigError("teacher feature " + std::to_string(f) + " out of range");
    }
    for (const auto& t : tasks) {
      for (auto f : t.features) {
        if (f >= dim) throw ConfigError("teacher feature " + std::to_string(f) + " out of range");
      }
      if (t.kind == TaskKind::Multiclass && t.classes < 2) {
        throw ConfigError("synthetic multiclass task needs at least 2 classes");
      }
    }
  }
};

/// Affine scoring functions: one per class (multiclass) or a single one.
struct Teacher {
  std::vector<std::vector<double>> weights;
  std::vector<double> bias;

  std::vector<double> scores(std::span<const double> x) const {
    std::vector<double> s(bias);
    for (std::size_t c = 0; c < weights.size(); ++c) {
      for (std::size_t j = 0; j < x.size(); ++j) s[c] += weights[c][j] * x[j];
    }
    return s;
  }

  /// Clean label for x under this teacher.
  double label(TaskKind kind, std::span<const double> x) const {
    const auto s = scores(x);
    switch (kind) {
      case TaskKind::Binary: return s[0] > 0 ? 1.0 : 0.0;
      case TaskKind::Multiclass:
        return static_cast<double>(std::max_element(s.begin(), s.end()) - s.begin());
      case TaskKind::Regression: return 1.0 / (1.0 + std::exp(-s[0]));
    }
    return 0.0;
  }
};

struct SyntheticData {
  MultiTaskBatch train;
  MultiTaskBatch val;
  std::vector<Teacher> teachers;
};

namespace detail {

inline Teacher draw_teacher(const SyntheticTask& task, std::size_t dim,
                            const std::vector<std::size_t>& support, Rng& rng) {
  const std::size_t heads = task.kind == TaskKind::Multiclass ? task.classes : 1;
  Teacher t;
  const double scale = 1.0 / std::sqrt(static_cast<double>(support.size()));
  for (std::size_t c = 0; c < heads; ++c) {
    std::vector<double> w(dim, 0.0);
    for (auto j : support) w[j] = standard_normal(rng) * scale;
    t.weights.push_back(std::move(w));
    t.bias.push_back(standard_normal(rng));
  }
  return t;
}

/// Class marginals must lie in [0.4/K, 1.6/K] ([0.2, 0.8] for K = 2).
inline bool balanced(const std::vector<double>& labels, std::size_t k) {
  std::vector<std::size_t> counts(k, 0);
  for (double y : labels) ++counts[static_cast<std::size_t>(y)];
  const double n = static_cast<double>(labels.size());
  for (auto c : counts) {
    const double frac = static_cast<double>(c) / n;
    if (frac < 0.4 / static_cast<double>(k) || frac > 1.6 / static_cast<double>(k)) return false;
  }
  return true;
}

}  // namespace detail

/// Features uniform in [-pi, pi]^d labelled by random affine teachers:
/// binary = sign, K-class = argmax of K teachers, regression = logistic
/// squash into [0, 1]. Teachers whose training-split class marginals are
/// unbalanced are redrawn. Deterministic in `teacher_seed`.
inline SyntheticData gen_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  std::vector<std::size_t> support = spec.teacher_features;
  if (support.empty()) {
    for (std::size_t j = 0; j < spec.dim; ++j) support.push_back(j);
  }

  Rng feat_rng(derive_seed(spec.teacher_seed, 1));
  auto draw_features = [&](std::size_t n) {
    std::vector<double> f(n * spec.dim);
    for (auto& v : f) v = uniform(feat_rng, -std::numbers::pi, std::numbers::pi);
    return f;
  };

  SyntheticData out;
  out.train.dim = out.val.dim = spec.dim;
  out.train.features = draw_features(spec.n_train);
  out.val.features = draw_features(spec.n_val);

  Rng teacher_rng(derive_seed(spec.teacher_seed, 2));
  Rng label_rng(derive_seed(spec.teacher_seed, 3));
  for (const auto& task : spec.tasks) {
    Teacher teacher;
    std::vector<double> train_labels(spec.n_train);
    const std::size_t k = task.kind == TaskKind::Binary ? 2 : task.classes;
    constexpr int kMaxDraws = 1000;
    int draw = 0;
    for (; draw < kMaxDraws; ++draw) {
      teacher = detail::draw_teacher(task, spec.dim, task.features.empty() ? support : task.features,
                                     teacher_rng);
      for (std::size_t i = 0; i < spec.n_train; ++i) {
        train_labels[i] = teacher.label(task.kind, out.train.row(i));
      }
      if (task.kind == TaskKind::Regression || detail::balanced(train_labels, k)) break;
    }
    if (draw == kMaxDraws) throw ConfigError("could not draw a balanced teacher");

    std::vector<double> val_labels(spec.n_val);
    for (std::size_t i = 0; i < spec.n_val; ++i) val_labels[i] = teacher.label(task.kind, out.val.row(i));

    for (auto* col : {&train_labels, &val_labels}) {
      if (task.kind == TaskKind::Regression || spec.noise_level == 0.0) continue;
      for (auto& y : *col) {
        if (uniform01(label_rng) < spec.noise_level) {
          const auto shift = 1 + uniform_index(label_rng, k - 1);
          y = static_cast<double>((static_cast<std::size_t>(y) + shift) % k);
        }
      }
    }
    out.train.labels.push_back(std::move(train_labels));
    out.val.labels.push_back(std::move(val_labels));
    out.teachers.push_back(std::move(teacher));
  }

  Rng mask_rng(derive_seed(spec.teacher_seed, 4));
  const std::size_t T = spec.tasks.size();
  for (auto* batch : {&out.train, &out.val}) {
    for (std::size_t i = 0; i < batch->size() && T > 0; ++i) {
      const std::size_t keep = spec.one_task_per_sample ? uniform_index(mask_rng, T) : T;
      for (std::size_t t = 0; t < T; ++t) {
        bool drop = spec.one_task_per_sample && t != keep;
        if (!spec.one_task_per_sample && spec.missing_rate > 0) {
          drop = uniform01(mask_rng) < spec.missing_rate;
        }
        if (drop) batch->labels[t][i] = kMissingLabel;
      }
    }
  }
  return out;
}

}  // namespace qmtl
