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

#include <cmath>

#include "qmtl/noise.hpp"
#include "qmtl/random_circuit.hpp"

namespace {

using namespace qmtl;

Circuit single_ry() {
  Circuit c(1, 1);
  c.ry(0, ParamRef::trainable(0));
  return c;
}

TEST(Noise, ZeroProbabilityIsBitExact) {
  RandomCircuitOptions opts;
  opts.num_qubits = 3;
  const auto rc = random_circuit(opts, 5);
  NoiseSpec n;
  n.num_trajectories = 7;
  const auto noisy = noisy_expectations(rc.circuit, rc.theta, rc.inputs, rc.observables, n);
  const auto exact = evaluate_expectations(rc.circuit, rc.theta, rc.inputs, rc.observables);
  EXPECT_EQ(noisy, exact);
}

// Single-qubit depolarizing after Ry(theta): <Z> = (1 - 4p/3) cos(theta).
TEST(Noise, SingleQubitDepolarizingMatchesClosedForm) {
  const auto c = single_ry();
  for (double p : {0.05, 0.2}) {
    for (double theta : {0.4, 2.0}) {
      NoiseSpec n{p, 0.0, 20000, 17};
      const std::vector<double> th = {theta};
      const auto est = noisy_expectation_stats(c, th, {}, {PauliString::parse("Z0")}, n);
      const double expected = (1 - 4 * p / 3) * std::cos(theta);
      EXPECT_LE(std::abs(est.mean[0] - expected), 3 * est.std_error[0] + 1e-12) << "p=" << p;
    }
  }
}

// Two-qubit channel after a CNOT on |00>: the control Z flips for 8 of the
// 15 non-identity Pauli pairs, so <Z0> = 1 - 16 p / 15.
TEST(Noise, TwoQubitDepolarizingMatchesClosedForm) {
  Circuit c(2);
  c.cnot(0, 1);
  const double p = 0.3;
  NoiseSpec n{0.0, p, 20000, 3};
  const auto est = noisy_expectation_stats(c, {}, {}, {PauliString::parse("Z0"), PauliString::parse("Z1")}, n);
  const double expected = 1 - 16 * p / 15;
  for (int i = 0; i < 2; ++i) EXPECT_LE(std::abs(est.mean[i] - expected), 3 * est.std_error[i] + 1e-12);
}

TEST(Noise, FullDepolarizingOnXBasisStateAveragesOut) {
  Circuit c(1);
  c.h(0);
  NoiseSpec n{1.0, 0.0, 30000, 8};
  const auto est = noisy_expectation_stats(c, {}, {}, {PauliString::parse("X0")}, n);
  EXPECT_LE(std::abs(est.mean[0] - (-1.0 / 3)), 3 * est.std_error[0] + 1e-12);
}

TEST(Noise, DeterministicGivenSeed) {
  const auto c = single_ry();
  const std::vector<double> th = {0.9};
  NoiseSpec n{0.1, 0.0, 300, 42};
  const auto a = noisy_expectations(c, th, {}, {PauliString::parse("Z0")}, n);
  const auto b = noisy_expectations(c, th, {}, {PauliString::parse("Z0")}, n);
  EXPECT_EQ(a, b);
  n.seed = 43;
  EXPECT_NE(a, noisy_expectations(c, th, {}, {PauliString::parse("Z0")}, n));
}

TEST(Noise, RejectsInvalidSpecs) {
  const auto c = single_ry();
  const std::vector<double> th = {0.0};
  EXPECT_THROW(noisy_expectations(c, th, {}, {PauliString::parse("Z0")}, NoiseSpec{-0.1, 0, 10, 0}), ConfigError);
  EXPECT_THROW(noisy_expectations(c, th, {}, {PauliString::parse("Z0")}, NoiseSpec{0.1, 1.5, 10, 0}), ConfigError);
  EXPECT_THROW(noisy_expectations(c, th, {}, {PauliString::parse("Z0")}, NoiseSpec{0.1, 0, 0, 0}), ConfigError);
}

TEST(NoiseProperty, MeansStayInsideUnitInterval) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    RandomCircuitOptions opts;
    opts.num_qubits = 3;
    const auto rc = random_circuit(opts, 900 + seed);
    const auto v = noisy_expectations(rc.circuit, rc.theta, rc.inputs, rc.observables, NoiseSpec{0.1, 0.1, 200, seed});
    for (double x : v) EXPECT_LE(std::abs(x), 1.0 + 1e-12);
  }
}

}  // namespace
