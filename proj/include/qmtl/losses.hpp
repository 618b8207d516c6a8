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

// Per-sample task losses with gradients w.r.t. the logits, class weighting,
// and the multi-task reduction.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "qmtl/errors.hpp"

namespace qmtl {

enum class TaskKind { Binary, Multiclass, Regression };

/// Label value marking an unlabelled (task, sample) entry.
inline constexpr double kMissingLabel = -100.0;

inline bool is_missing(double label) noexcept { return label == kMissingLabel; }

struct LossOptions {
  bool focal = false;
  double focal_gamma = 2.0;
  double focal_alpha = 1.0;
  /// Per-class weights (index = class); empty means all ones.
  std::vector<double> class_weights;
};

struct LossResult {
  double value = 0.0;
  /// Entry was MISSING and contributes nothing.
  bool skipped = false;
};

namespace detail {

inline double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

inline double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

inline std::size_t class_label(double label, std::size_t k) {
  const double r = std::round(label);
  if (label < 0 || r != label || r >= static_cast<double>(k)) {
    throw IndexError("class label " + std::to_string(label) + " invalid for " + std::to_string(k) +
                     " classes");
  }
  return static_cast<std::size_t>(r);
}

inline double class_weight(const LossOptions& o, std::size_t c) {
  if (o.class_weights.empty()) return 1.0;
  if (c >= o.class_weights.size()) throw IndexError("no class weight for class " + std::to_string(c));
  return o.class_weights[c];
}

/// -alpha w (1-p)^g log p for true-class probability p.
inline double focal_value(double p, double logp, double g, double a, double w) {
  return -a * w * std::pow(1.0 - p, g) * logp;
}

/// p * d(focal)/dp = -alpha w ((1-p)^g - g p (1-p)^(g-1) log p).
inline double focal_bracket(double p, double logp, double g, double a, double w) {
  const double q = 1.0 - p;
  const double tail = g == 0.0 ? 0.0 : g * p * std::pow(q, g - 1.0) * logp;
  return -a * w * (std::pow(q, g) - tail);
}

}  // namespace detail

inline std::size_t num_logits(TaskKind kind, std::size_t classes) {
  return kind == TaskKind::Multiclass ? classes : 1;
}

/// Loss for one (task, sample). When `dlogits` is non-empty it receives
/// d(loss)/d(logits) (overwritten). MISSING labels give a skipped zero.
inline LossResult task_loss(TaskKind kind, std::span<const double> logits, double label,
                            const LossOptions& opts = {}, std::span<double> dlogits = {}) {
  std::fill(dlogits.begin(), dlogits.end(), 0.0);
  if (is_missing(label)) return {0.0, true};
  switch (kind) {
    case TaskKind::Binary: {
      if (logits.size() != 1) throw DimensionError("binary task takes one logit");
      const auto y = detail::class_label(label, 2);
      const double z = logits[0];
      const double w = detail::class_weight(opts, y);
      // log p(true) = -softplus(-z) for y=1, -softplus(z) for y=0.
      const double logp = y == 1 ? -detail::softplus(-z) : -detail::softplus(z);
      const double p = std::exp(logp);
      const double sign = y == 1 ? 1.0 : -1.0;
      if (!opts.focal) {
        if (!dlogits.empty()) dlogits[0] = w * (detail::sigmoid(z) - static_cast<double>(y));
        return {-w * logp, false};
      }
      const double g = opts.focal_gamma, a = opts.focal_alpha;
      if (!dlogits.empty()) {
        // dp/dz = sign * p (1 - p)
        dlogits[0] = detail::focal_bracket(p, logp, g, a, w) * sign * (1.0 - p);
      }
      return {detail::focal_value(p, logp, g, a, w), false};
    }
    case TaskKind::Multiclass: {
      const std::size_t k = logits.size();
      if (k < 2) throw DimensionError("multiclass task needs at least two logits");
      const auto c = detail::class_label(label, k);
      const double mx = *std::max_element(logits.begin(), logits.end());
      double sum = 0;
      for (double z : logits) sum += std::exp(z - mx);
      const double lse = mx + std::log(sum);
      const double logp = logits[c] - lse;
      const double p = std::exp(logp);
      const double w = detail::class_weight(opts, c);
      if (!opts.focal) {
        if (!dlogits.empty()) {
          for (std::size_t j = 0; j < k; ++j) {
            dlogits[j] = w * (std::exp(logits[j] - lse) - (j == c ? 1.0 : 0.0));
          }
        }
        return {-w * logp, false};
      }
      const double g = opts.focal_gamma, a = opts.focal_alpha;
      if (!dlogits.empty()) {
        // d(focal)/dz_j = bracket * (delta_cj - p_j)
        const double br = detail::focal_bracket(p, logp, g, a, w);
        for (std::size_t j = 0; j < k; ++j) {
          dlogits[j] = br * ((j == c ? 1.0 : 0.0) - std::exp(logits[j] - lse));
        }
      }
      return {detail::focal_value(p, logp, g, a, w), false};
    }
    case TaskKind::Regression: {
      if (logits.size() != 1) throw DimensionError("regression task takes one output");
      const double r = logits[0] - label;
      if (!dlogits.empty()) dlogits[0] = 2.0 * r;
      return {r * r, false};
    }
  }
  return {};
}

/// Inverse-frequency weights w_c = N / (K n_c), K = counts.size().
inline std::vector<double> class_weights(std::span<const std::size_t> counts, std::size_t total) {
  if (counts.empty()) throw ConfigError("class weights need at least one class");
  std::vector<double> w;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] == 0) {
      throw ConfigError("class " + std::to_string(c) + " has zero count; smooth or drop it");
    }
    w.push_back(static_cast<double>(total) /
                (static_cast<double>(counts.size()) * static_cast<double>(counts[c])));
  }
  return w;
}

/// sum_t lambda_t * mean over that task's non-skipped entries. Skipped
/// entries are excluded from the task's count.
inline double mtl_loss(const std::vector<std::vector<LossResult>>& per_task,
                       std::span<const double> lambdas) {
  if (per_task.size() != lambdas.size()) throw DimensionError("one lambda per task required");
  double total = 0;
  bool any = false;
  for (std::size_t t = 0; t < per_task.size(); ++t) {
    double s = 0;
    std::size_t n = 0;
    for (const auto& l : per_task[t]) {
      if (l.skipped) continue;
      s += l.value;
      ++n;
    }
    if (n == 0) continue;
    any = true;
    total += lambdas[t] * (s / static_cast<double>(n));
  }
  if (!any) throw DegenerateError("no labelled entries contribute to the loss");
  return total;
}

/// Positive-class probability of a 3-class (uncertain, negative, positive)
/// prediction with the uncertain mass removed.
inline double binarize_3class(double p_neg, double p_pos) {
  if (p_neg < 0 || p_pos < 0) throw ConfigError("probabilities must be non-negative");
  if (p_neg + p_pos == 0) throw DegenerateError("negative and positive mass both zero");
  return p_pos / (p_pos + p_neg);
}

}  // namespace qmtl
