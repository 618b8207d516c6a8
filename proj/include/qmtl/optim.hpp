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
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "qmtl/errors.hpp"
#include "qmtl/models.hpp"

namespace qmtl {

enum class OptimizerKind { Adam, AdamW };

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::Adam;
  double lr = 1e-3;
  double weight_decay = 0.0;
  /// Global gradient-norm ceiling applied before every step.
  double clip_norm = 1.0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  void validate() const {
    if (!(lr > 0)) throw ConfigError("learning rate must be positive");
    if (!(clip_norm > 0)) throw ConfigError("clip_norm must be positive");
    if (weight_decay < 0) throw ConfigError("weight_decay must be non-negative");
  }
};

/// Rescales `grads` so their L2 norm is at most `max_norm`. Returns the norm
/// before clipping.
inline double clip_grad_norm(std::span<double> grads, double max_norm) {
  double sq = 0;
  for (double g : grads) sq += g * g;
  const double norm = std::sqrt(sq);
  if (norm > max_norm) {
    const double scale = max_norm / norm;
    for (auto& g : grads) g *= scale;
  }
  return norm;
}

struct OptimizerState {
  std::vector<double> m;
  std::vector<double> v;
  std::size_t step = 0;

  explicit OptimizerState(std::size_t n = 0) : m(n, 0.0), v(n, 0.0) {}
};

/// One clipped Adam / AdamW update. Weight decay only touches parameters of
/// class Classical: coupled (added to the gradient) for Adam, decoupled for
/// AdamW. `grads` is clipped in place.
inline void optimizer_step(OptimizerState& state, std::span<double> params, std::span<double> grads,
                           std::span<const ParamClass> classes, const OptimizerConfig& cfg) {
  const std::size_t n = params.size();
  if (grads.size() != n || classes.size() != n || state.m.size() != n || state.v.size() != n) {
    throw DimensionError("optimizer state, parameters and gradients must align");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(grads[i])) {
      throw NonFiniteError("gradient[" + std::to_string(i) + "] = " + std::to_string(grads[i]) +
                           " at optimizer step " + std::to_string(state.step + 1));
    }
  }
  clip_grad_norm(grads, cfg.clip_norm);

  ++state.step;
  const double t = static_cast<double>(state.step);
  const double bc1 = 1.0 - std::pow(cfg.beta1, t);
  const double bc2 = 1.0 - std::pow(cfg.beta2, t);
  for (std::size_t i = 0; i < n; ++i) {
    const bool decays = classes[i] == ParamClass::Classical && cfg.weight_decay > 0;
    double g = grads[i];
    if (decays && cfg.kind == OptimizerKind::Adam) g += cfg.weight_decay * params[i];
    if (decays && cfg.kind == OptimizerKind::AdamW) params[i] -= cfg.lr * cfg.weight_decay * params[i];
    state.m[i] = cfg.beta1 * state.m[i] + (1 - cfg.beta1) * g;
    state.v[i] = cfg.beta2 * state.v[i] + (1 - cfg.beta2) * g * g;
    const double mhat = state.m[i] / bc1;
    const double vhat = state.v[i] / bc2;
    params[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
  }
}

struct PlateauConfig {
  double factor = 0.2;
  std::size_t patience = 2;
  double min_lr = 1e-7;
};

/// Reduce-on-plateau for a metric that should increase. After more than
/// `patience` consecutive checks without a strict improvement the rate is
/// multiplied by `factor`, floored at `min_lr`.
class PlateauScheduler {
 public:
  PlateauScheduler(double lr, PlateauConfig cfg) : lr_(lr), cfg_(cfg) {}

  double lr() const noexcept { return lr_; }

  double step(double monitored) {
    if (!std::isfinite(monitored)) throw NonFiniteError("plateau scheduler received non-finite value");
    if (monitored > best_) {
      best_ = monitored;
      bad_ = 0;
    } else if (++bad_ > cfg_.patience) {
      lr_ = std::max(lr_ * cfg_.factor, cfg_.min_lr);
      bad_ = 0;
    }
    return lr_;
  }

 private:
  double lr_;
  PlateauConfig cfg_;
  double best_ = -std::numeric_limits<double>::infinity();
  std::size_t bad_ = 0;
};

}  // namespace qmtl
