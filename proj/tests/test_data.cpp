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

#include <gtest/gtest.h>

#include <numbers>

#include "qmtl/data.hpp"

namespace {

using namespace qmtl;

SyntheticSpec spec3() {
  SyntheticSpec s;
  s.teacher_seed = 17;
  s.tasks = {{TaskKind::Binary, 2, {}}, {TaskKind::Multiclass, 3, {}}, {TaskKind::Regression, 1, {}}};
  return s;
}

TEST(Synthetic, ShapesAndRanges) {
  const auto d = gen_synthetic(spec3());
  EXPECT_EQ(d.train.size(), 512u);
  EXPECT_EQ(d.val.size(), 256u);
  EXPECT_EQ(d.train.num_tasks(), 3u);
  for (double v : d.train.features) {
    EXPECT_GE(v, -std::numbers::pi);
    EXPECT_LE(v, std::numbers::pi);
  }
  for (double y : d.train.labels[2]) {
    EXPECT_GT(y, 0.0);
    EXPECT_LT(y, 1.0);
  }
  EXPECT_FALSE(d.train.any_missing());
}

TEST(Synthetic, LabelsFollowTeachersAndAreBalanced) {
  const auto d = gen_synthetic(spec3());
  for (std::size_t t = 0; t < 2; ++t) {
    const std::size_t k = t == 0 ? 2 : 3;
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < d.train.size(); ++i) {
      const double y = d.train.labels[t][i];
      EXPECT_EQ(y, d.teachers[t].label(spec3().tasks[t].kind, d.train.row(i)));
      ++counts[static_cast<std::size_t>(y)];
    }
    for (auto c : counts) {
      const double frac = static_cast<double>(c) / 512.0;
      EXPECT_GE(frac, 0.4 / static_cast<double>(k));
      EXPECT_LE(frac, 1.6 / static_cast<double>(k));
    }
  }
}

TEST(Synthetic, DeterministicInSeed) {
  const auto a = gen_synthetic(spec3());
  const auto b = gen_synthetic(spec3());
  EXPECT_EQ(a.train.features, b.train.features);
  EXPECT_EQ(a.train.labels, b.train.labels);
  auto s = spec3();
  s.teacher_seed = 18;
  EXPECT_NE(gen_synthetic(s).train.features, a.train.features);
}

TEST(Synthetic, TeacherSupportRestrictsWeights) {
  auto s = spec3();
  s.teacher_features = {1, 4};
  s.tasks[0].features = {7};
  const auto d = gen_synthetic(s);
  for (std::size_t j = 0; j < s.dim; ++j) {
    EXPECT_EQ(d.teachers[0].weights[0][j] != 0.0, j == 7);
    for (const auto& w : d.teachers[1].weights) EXPECT_EQ(w[j] != 0.0, j == 1 || j == 4);
  }
}

TEST(Synthetic, LabelNoiseFlipsRoughlyTheRequestedFraction) {
  auto clean = spec3();
  auto noisy = spec3();
  noisy.noise_level = 0.2;
  const auto a = gen_synthetic(clean), b = gen_synthetic(noisy);
  for (std::size_t t = 0; t < 2; ++t) {
    std::size_t flips = 0;
    for (std::size_t i = 0; i < 512; ++i) flips += a.train.labels[t][i] != b.train.labels[t][i];
    // 3 binomial standard errors around 0.2 * 512
    EXPECT_NEAR(static_cast<double>(flips), 102.4, 3 * std::sqrt(512 * 0.2 * 0.8));
  }
}

TEST(Synthetic, Masking) {
  auto s = spec3();
  s.one_task_per_sample = true;
  const auto d = gen_synthetic(s);
  for (std::size_t i = 0; i < d.train.size(); ++i) {
    int labelled = 0;
    for (std::size_t t = 0; t < 3; ++t) labelled += !is_missing(d.train.labels[t][i]);
    EXPECT_EQ(labelled, 1);
  }
  s.one_task_per_sample = false;
  s.missing_rate = 0.5;
  const auto m = gen_synthetic(s);
  std::size_t missing = 0;
  for (const auto& col : m.train.labels) {
    for (double y : col) missing += is_missing(y);
  }
  EXPECT_NEAR(static_cast<double>(missing), 768.0, 3 * std::sqrt(1536 * 0.25));
}

TEST(Synthetic, Validation) {
  auto s = spec3();
  s.noise_level = 0.5;
  EXPECT_THROW(gen_synthetic(s), ConfigError);
  s = spec3();
  s.teacher_features = {12};
  EXPECT_THROW(gen_synthetic(s), ConfigError);
  s = spec3();
  s.tasks[1].classes = 1;
  EXPECT_THROW(gen_synthetic(s), ConfigError);
}

TEST(TaskSpec, DefaultsAndValidation) {
  TaskSpec t{"r", TaskKind::Regression, 1, 1.0, {}, {}, false};
  EXPECT_EQ(t.primary_metric(), Metric::Spearman);
  EXPECT_EQ(t.num_outputs(), 1u);
  t.binarize_eval = true;
  EXPECT_THROW(t.validate(), ConfigError);
  TaskSpec c{"c", TaskKind::Multiclass, 4, -1.0, {}, {}, false};
  EXPECT_EQ(c.num_outputs(), 4u);
  EXPECT_THROW(c.validate(), ConfigError);
}

}  // namespace
