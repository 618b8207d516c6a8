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

// Evaluation metrics. Rows whose label is MISSING are dropped first. When a
// denominator vanishes (constant predictor, no predicted positives, zero
// variance) the value is 0 and `degenerate` is set.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qmtl/errors.hpp"
#include "qmtl/losses.hpp"

namespace qmtl {

enum class Metric { Accuracy, Precision, Recall, F1, MCC, Pearson, Spearman };

inline std::string_view metric_name(Metric m) {
  switch (m) {
    case Metric::Accuracy: return "accuracy";
    case Metric::Precision: return "precision";
    case Metric::Recall: return "recall";
    case Metric::F1: return "f1";
    case Metric::MCC: return "mcc";
    case Metric::Pearson: return "pearson";
    case Metric::Spearman: return "spearman";
  }
  return "?";
}

inline Metric parse_metric(std::string_view s) {
  for (auto m : {Metric::Accuracy, Metric::Precision, Metric::Recall, Metric::F1, Metric::MCC,
                 Metric::Pearson, Metric::Spearman}) {
    if (metric_name(m) == s) return m;
  }
  if (s == "acc") return Metric::Accuracy;
  if (s == "matthews") return Metric::MCC;
  throw ConfigError("unknown metric '" + std::string(s) + "'");
}

struct MetricValue {
  double value = 0.0;
  bool degenerate = false;
};

namespace detail {

inline double safe_div(double num, double den, bool& degenerate) {
  if (den == 0.0) {
    degenerate = true;
    return 0.0;
  }
  return num / den;
}

inline MetricValue pearson_raw(std::span<const double> a, std::span<const double> b) {
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  MetricValue out;
  out.value = safe_div(sab, std::sqrt(saa * sbb), out.degenerate);
  out.value = std::clamp(out.value, -1.0, 1.0);
  return out;
}

/// 1-based ranks, ties share their average rank.
inline std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](auto x, auto y) { return v[x] < v[y]; });
  std::vector<double> rank(v.size());
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[idx[k]] = r;
    i = j + 1;
  }
  return rank;
}

}  // namespace detail

/// Computes one metric. For classification metrics `predictions` and
/// `labels` hold class indices and `num_classes` is K (2 = binary, where
/// precision/recall/F1 refer to class 1; otherwise macro averages).
inline MetricValue compute_metric(Metric metric, std::span<const double> predictions,
                                  std::span<const double> labels, std::size_t num_classes = 2) {
  if (predictions.size() != labels.size()) throw DimensionError("predictions and labels differ in length");
  std::vector<double> p, y;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (is_missing(labels[i])) continue;
    p.push_back(predictions[i]);
    y.push_back(labels[i]);
  }
  if (y.empty()) throw DegenerateError("no labelled rows to score");

  if (metric == Metric::Pearson) return detail::pearson_raw(p, y);
  if (metric == Metric::Spearman) {
    const auto rp = detail::average_ranks(p);
    const auto ry = detail::average_ranks(y);
    return detail::pearson_raw(rp, ry);
  }

  const std::size_t k = std::max<std::size_t>(num_classes, 2);
  std::vector<double> cm(k * k, 0.0);  // cm[true * k + pred]
  for (std::size_t i = 0; i < y.size(); ++i) {
    const auto t = detail::class_label(y[i], k);
    const auto q = detail::class_label(p[i], k);
    cm[t * k + q] += 1.0;
  }
  const double n = static_cast<double>(y.size());
  MetricValue out;
  if (metric == Metric::Accuracy) {
    double diag = 0;
    for (std::size_t c = 0; c < k; ++c) diag += cm[c * k + c];
    out.value = diag / n;
    return out;
  }

  // Precision, recall or F1 of class c against the rest.
  auto one_vs_rest = [&](std::size_t c, bool& deg) {
    double tp = cm[c * k + c], fp = 0, fn = 0;
    for (std::size_t o = 0; o < k; ++o) {
      if (o == c) continue;
      fp += cm[o * k + c];
      fn += cm[c * k + o];
    }
    if (metric == Metric::Precision) return detail::safe_div(tp, tp + fp, deg);
    if (metric == Metric::Recall) return detail::safe_div(tp, tp + fn, deg);
    return detail::safe_div(2 * tp, 2 * tp + fp + fn, deg);
  };

  if (metric == Metric::MCC) {
    // Multiclass generalisation; reduces to the usual 2x2 formula for K = 2.
    std::vector<double> tk(k, 0.0), pk(k, 0.0);
    double correct = 0;
    for (std::size_t a = 0; a < k; ++a) {
      correct += cm[a * k + a];
      for (std::size_t b = 0; b < k; ++b) {
        tk[a] += cm[a * k + b];
        pk[b] += cm[a * k + b];
      }
    }
    double tp_sum = 0, tt = 0, pp = 0;
    for (std::size_t c = 0; c < k; ++c) {
      tp_sum += tk[c] * pk[c];
      tt += tk[c] * tk[c];
      pp += pk[c] * pk[c];
    }
    out.value = detail::safe_div(correct * n - tp_sum, std::sqrt((n * n - pp) * (n * n - tt)),
                                 out.degenerate);
    out.value = std::clamp(out.value, -1.0, 1.0);
    return out;
  }

  if (k == 2) {
    out.value = one_vs_rest(1, out.degenerate);
  } else {
    for (std::size_t c = 0; c < k; ++c) out.value += one_vs_rest(c, out.degenerate) / static_cast<double>(k);
  }
  return out;
}

}  // namespace qmtl
