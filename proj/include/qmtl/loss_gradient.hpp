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

// Chain rule from the multi-task loss to every model parameter.

#include <span>
#include <string>
#include <vector>

#include "qmtl/data.hpp"
#include "qmtl/losses.hpp"
#include "qmtl/models.hpp"

namespace qmtl {

struct LossGradient {
  double loss = 0.0;
  std::vector<double> grad;
  /// Labelled rows per task that entered the loss.
  std::vector<std::size_t> contributing;
};

/// Loss sum_t lambda_t mean_{labelled rows} L_t over `rows`, and its gradient.
/// Tasks with `active[t] == false` are left out entirely (empty = all
/// active). MISSING entries contribute neither loss nor gradient.
inline LossGradient loss_gradient(const HeadModel& model, std::span<const double> params,
                                  const MultiTaskBatch& batch, std::span<const std::size_t> rows,
                                  const std::vector<TaskSpec>& tasks,
                                  const std::vector<bool>& active = {}) {
  const std::size_t T = tasks.size();
  if (batch.num_tasks() != T) throw DimensionError("batch label columns do not match task count");
  const auto sizes = model.output_sizes();
  if (sizes.size() != T) throw DimensionError("model head count does not match task count");
  for (std::size_t t = 0; t < T; ++t) {
    if (sizes[t] != tasks[t].num_outputs()) {
      throw DimensionError("task '" + tasks[t].name + "' needs " +
                           std::to_string(tasks[t].num_outputs()) + " logits, head has " +
                           std::to_string(sizes[t]));
    }
  }
  auto is_active = [&](std::size_t t) { return active.empty() || active[t]; };

  LossGradient out;
  out.grad.assign(model.num_params(), 0.0);
  out.contributing.assign(T, 0);
  for (auto r : rows) {
    for (std::size_t t = 0; t < T; ++t) {
      if (is_active(t) && !is_missing(batch.labels[t][r])) ++out.contributing[t];
    }
  }
  bool any = false;
  for (std::size_t t = 0; t < T; ++t) any |= out.contributing[t] > 0;
  if (!any) throw DegenerateError("every label in the batch is missing");

  std::vector<double> task_sum(T, 0.0);
  for (auto r : rows) {
    const auto x = batch.row(r);
    const auto logits = model.forward(params, x);
    TaskLogits upstream(T);
    bool needed = false;
    for (std::size_t t = 0; t < T; ++t) {
      upstream[t].assign(sizes[t], 0.0);
      if (!is_active(t) || out.contributing[t] == 0) continue;
      const auto res = task_loss(tasks[t].kind, logits[t], batch.labels[t][r], tasks[t].loss,
                                 upstream[t]);
      if (res.skipped) continue;
      task_sum[t] += res.value;
      const double scale = tasks[t].lambda / static_cast<double>(out.contributing[t]);
      for (auto& u : upstream[t]) {
        u *= scale;
        needed |= u != 0.0;
      }
    }
    if (needed) model.accumulate_gradient(params, x, upstream, out.grad);
  }
  for (std::size_t t = 0; t < T; ++t) {
    if (out.contributing[t] > 0) {
      out.loss += tasks[t].lambda * (task_sum[t] / static_cast<double>(out.contributing[t]));
    }
  }
  return out;
}

}  // namespace qmtl
