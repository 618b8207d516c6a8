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
#include <numbers>

#include "oracle.hpp"
#include "qmtl/circuit.hpp"
#include "qmtl/pauli.hpp"
#include "qmtl/random_circuit.hpp"

namespace {

using namespace qmtl;

TEST(PauliString, ParseAndFormat) {
  EXPECT_EQ(PauliString::parse("X0 X1").to_string(), "X0 X1");
  EXPECT_EQ(PauliString::parse("Z1Z0").to_string(), "Z0 Z1");
  EXPECT_EQ(PauliString::parse("y3"), PauliString::single(3, Pauli::Y));
  EXPECT_EQ(PauliString::parse("Z0 Z1").weight(), 2u);
}

TEST(PauliString, RejectsMalformedInput) {
  EXPECT_THROW(PauliString::parse("Q0"), ConfigError);
  EXPECT_THROW(PauliString::parse("X"), ConfigError);
  EXPECT_THROW(PauliString::parse(""), ConfigError);
  EXPECT_THROW(PauliString::parse("X0 Z0"), ConfigError);
}

TEST(PauliString, Remap) {
  const auto p = PauliString::parse("Z0 X1").remapped({4, 7});
  EXPECT_EQ(p.to_string(), "Z4 X7");
  EXPECT_THROW(PauliString::parse("Z2").remapped({0, 1}), IndexError);
}

TEST(Expectation, ComputationalBasis) {
  auto s = Statevector::zero(2);
  EXPECT_DOUBLE_EQ(expectation(s, PauliString::parse("Z0")), 1.0);
  s.apply(OneQubitGate::x(), 1);
  EXPECT_DOUBLE_EQ(expectation(s, PauliString::parse("Z1")), -1.0);
  EXPECT_DOUBLE_EQ(expectation(s, PauliString::parse("Z0 Z1")), -1.0);
  EXPECT_DOUBLE_EQ(expectation(s, PauliString::parse("X0")), 0.0);
}

TEST(Expectation, RyAngleGivesCosine) {
  for (double t : {0.0, 0.3, 1.2, 2.9}) {
    auto s = Statevector::zero(1);
    s.apply(OneQubitGate::ry(t), 0);
    EXPECT_NEAR(expectation(s, PauliString::parse("Z0")), std::cos(t), 1e-15);
    EXPECT_NEAR(expectation(s, PauliString::parse("X0")), std::sin(t), 1e-15);
  }
}

TEST(Expectation, YEigenstate) {
  auto s = Statevector::zero(1);
  s.apply(OneQubitGate::rx(-std::numbers::pi / 2), 0);
  EXPECT_NEAR(expectation(s, PauliString::parse("Y0")), 1.0, 1e-15);
}

TEST(Expectation, ObservableOutsideRegister) {
  const auto s = Statevector::zero(2);
  EXPECT_THROW(expectation(s, PauliString::parse("Z2")), IndexError);
}

TEST(ExpectationProperty, RealBoundedAndMatchesOracle) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    RandomCircuitOptions opts;
    opts.num_qubits = 1 + seed % 4;
    const auto rc = random_circuit(opts, 700 + seed);
    const auto s = evaluate(rc.circuit, rc.theta, rc.inputs);
    const auto psi = oracle::run(rc.circuit, rc.theta, rc.inputs);
    for (const auto& o : rc.observables) {
      const auto ref = oracle::expectation(psi, o, opts.num_qubits);
      const double v = expectation(s, o);
      EXPECT_LE(std::abs(ref.imag()), 1e-12);
      EXPECT_NEAR(v, ref.real(), 1e-12);
      EXPECT_LE(std::abs(v), 1.0 + 1e-12);
    }
  }
}

TEST(Commuting, QubitWise) {
  EXPECT_TRUE(qubit_wise_commute(PauliString::parse("Z0"), PauliString::parse("Z0 Z1")));
  EXPECT_TRUE(qubit_wise_commute(PauliString::parse("Z0"), PauliString::parse("X1")));
  EXPECT_FALSE(qubit_wise_commute(PauliString::parse("Z0"), PauliString::parse("X0 X1")));
  EXPECT_THROW(check_commuting_group({PauliString::parse("Z0"), PauliString::parse("X0")}), GroupingError);
}

TEST(Commuting, GreedyGroupingIsOrderStable) {
  const std::vector<PauliString> obs = {PauliString::parse("Z0"), PauliString::parse("Z1"),
                                        PauliString::parse("X0 X1")};
  const auto groups = group_commuting_indices(obs);
  ASSERT_EQ(groups.size(), 2u);
  EXPECT_EQ(groups[0], (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(groups[1], (std::vector<std::size_t>{2}));
}

TEST(Sampling, ConvergesToExactWithinBinomialError) {
  RandomCircuitOptions opts;
  opts.num_qubits = 3;
  const auto rc = random_circuit(opts, 42);
  const auto s = evaluate(rc.circuit, rc.theta, rc.inputs);
  const std::vector<PauliString> obs = {PauliString::parse("Z0"), PauliString::parse("X1"),
                                        PauliString::parse("Y2 Z0"), PauliString::parse("X0 X1 X2")};
  const std::size_t shots = 40000;
  const auto est = sampled_expectations(s, obs, shots, 9);
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const double exact = expectation(s, obs[i]);
    const double se = std::sqrt((1 - exact * exact) / shots);
    EXPECT_LE(std::abs(est[i] - exact), 5 * se + 1e-12) << obs[i].to_string();
  }
}

TEST(Sampling, DeterministicGivenSeed) {
  auto s = Statevector::zero(2);
  s.apply(OneQubitGate::ry(1.0), 0);
  s.apply(OneQubitGate::rx(0.4), 1);
  const std::vector<PauliString> g = {PauliString::parse("Z0"), PauliString::parse("Z0 Z1")};
  EXPECT_EQ(sample_expectation(s, g, 500, 3), sample_expectation(s, g, 500, 3));
  EXPECT_NE(sample_expectation(s, g, 500, 3), sample_expectation(s, g, 500, 4));
}

TEST(Sampling, EigenstateIsExactUnderShots) {
  auto s = Statevector::zero(2);
  s.apply(OneQubitGate::x(), 1);
  const auto v = sample_expectation(s, {PauliString::parse("Z0"), PauliString::parse("Z1")}, 100, 0);
  EXPECT_EQ(v[0], 1.0);
  EXPECT_EQ(v[1], -1.0);
}

TEST(Sampling, RejectsNonCommutingGroupAndZeroShots) {
  const auto s = Statevector::zero(1);
  EXPECT_THROW(sample_expectation(s, {PauliString::parse("Z0"), PauliString::parse("X0")}, 10, 0), GroupingError);
  EXPECT_THROW(sample_expectation(s, {PauliString::parse("Z0")}, 0, 0), ConfigError);
}

}  // namespace
