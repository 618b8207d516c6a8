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

#include <random>

#include "qmtl/metrics.hpp"

namespace {

using namespace qmtl;

double m(Metric k, const std::vector<double>& p, const std::vector<double>& y, std::size_t classes = 2) {
  return compute_metric(k, p, y, classes).value;
}

TEST(Metrics, PerfectPredictions) {
  const std::vector<double> y = {0, 1, 1, 0, 1};
  for (auto k : {Metric::Accuracy, Metric::Precision, Metric::Recall, Metric::F1, Metric::MCC}) {
    EXPECT_DOUBLE_EQ(m(k, y, y), 1.0) << metric_name(k);
  }
}

TEST(Metrics, HandConfusionMatrix) {
  const std::vector<double> p = {1, 1, 0, 0}, y = {1, 0, 1, 0};
  EXPECT_DOUBLE_EQ(m(Metric::Accuracy, p, y), 0.5);
  EXPECT_DOUBLE_EQ(m(Metric::Precision, p, y), 0.5);
  EXPECT_DOUBLE_EQ(m(Metric::Recall, p, y), 0.5);
  EXPECT_DOUBLE_EQ(m(Metric::F1, p, y), 0.5);
  EXPECT_DOUBLE_EQ(m(Metric::MCC, p, y), 0.0);
}

TEST(Metrics, BinaryMccMatchesTwoByTwoFormula) {
  // tp=3 fp=1 fn=2 tn=4
  const std::vector<double> p = {1, 1, 1, 1, 0, 0, 0, 0, 0, 0};
  const std::vector<double> y = {1, 1, 1, 0, 1, 1, 0, 0, 0, 0};
  const double expect = (3.0 * 4 - 1.0 * 2) / std::sqrt(4.0 * 5 * 5 * 6);
  EXPECT_NEAR(m(Metric::MCC, p, y), expect, 1e-15);
  EXPECT_NEAR(m(Metric::F1, p, y), 6.0 / 9.0, 1e-15);
}

TEST(Metrics, MacroAveragesForMulticlass) {
  const std::vector<double> p = {0, 1, 2, 2, 1, 0};
  const std::vector<double> y = {0, 1, 2, 1, 1, 2};
  // class 0: tp1 fp1 fn0; class 1: tp2 fp0 fn1; class 2: tp1 fp1 fn1
  EXPECT_NEAR(m(Metric::Precision, p, y, 3), (0.5 + 1.0 + 0.5) / 3, 1e-15);
  EXPECT_NEAR(m(Metric::Recall, p, y, 3), (1.0 + 2.0 / 3 + 0.5) / 3, 1e-15);
  EXPECT_NEAR(m(Metric::F1, p, y, 3), (2.0 / 3 + 0.8 + 0.5) / 3, 1e-15);
  EXPECT_NEAR(m(Metric::Accuracy, p, y, 3), 4.0 / 6, 1e-15);
}

TEST(Metrics, CorrelationInvariances) {
  const std::vector<double> y = {0.3, -1.2, 2.5, 0.0, 4.1, 1.7};
  std::vector<double> lin, mono;
  for (double v : y) {
    lin.push_back(2 * v + 3);
    mono.push_back(std::exp(v) - 5);
  }
  EXPECT_NEAR(m(Metric::Pearson, lin, y), 1.0, 1e-14);
  EXPECT_NEAR(m(Metric::Spearman, mono, y), 1.0, 1e-14);
  EXPECT_LT(m(Metric::Pearson, mono, y), 0.999);
}

TEST(Metrics, SpearmanAveragesTiedRanks) {
  // ranks of a: [1.5, 1.5, 3, 4]; b: [1, 2, 3, 4]
  const std::vector<double> a = {5, 5, 7, 9}, b = {1, 2, 3, 4};
  EXPECT_NEAR(m(Metric::Spearman, a, b), 4.5 / std::sqrt(4.5 * 5.0), 1e-14);
}

TEST(Metrics, MissingRowsDropped) {
  const std::vector<double> p = {1, 0, 1}, y = {1, kMissingLabel, 1};
  EXPECT_DOUBLE_EQ(m(Metric::Accuracy, p, y), 1.0);
  const std::vector<double> none = {kMissingLabel, kMissingLabel};
  EXPECT_THROW(compute_metric(Metric::Accuracy, none, none), DegenerateError);
  EXPECT_THROW(compute_metric(Metric::Accuracy, p, none), DimensionError);
}

TEST(Metrics, UndefinedDenominatorsAreFlagged) {
  const std::vector<double> p = {0, 0, 0}, y = {0, 1, 0};
  const auto prec = compute_metric(Metric::Precision, p, y);
  EXPECT_TRUE(prec.degenerate);
  EXPECT_EQ(prec.value, 0.0);
  const auto mcc = compute_metric(Metric::MCC, p, y);
  EXPECT_TRUE(mcc.degenerate);
  EXPECT_EQ(mcc.value, 0.0);
  const std::vector<double> flat = {1, 1, 1};
  EXPECT_TRUE(compute_metric(Metric::Pearson, flat, y).degenerate);
}

TEST(Metrics, Names) {
  EXPECT_EQ(parse_metric("acc"), Metric::Accuracy);
  EXPECT_EQ(parse_metric("matthews"), Metric::MCC);
  for (auto k : {Metric::Accuracy, Metric::Precision, Metric::Recall, Metric::F1, Metric::MCC, Metric::Pearson,
                 Metric::Spearman}) {
    EXPECT_EQ(parse_metric(metric_name(k)), k);
  }
  EXPECT_THROW(parse_metric("auc"), ConfigError);
}

TEST(Metrics, BoundsOnRandomInputs) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> cls(0, 2);
  std::normal_distribution<double> n;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> p, y, a, b;
    for (int i = 0; i < 20; ++i) {
      p.push_back(cls(rng));
      y.push_back(cls(rng));
      a.push_back(n(rng));
      b.push_back(n(rng));
    }
    for (auto k : {Metric::Accuracy, Metric::Precision, Metric::Recall, Metric::F1}) {
      const double v = m(k, p, y, 3);
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
    for (double v : {m(Metric::MCC, p, y, 3), m(Metric::Pearson, a, b), m(Metric::Spearman, a, b)}) {
      EXPECT_GE(v, -1.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

}  // namespace
