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
#include "qmtl/random_circuit.hpp"
#include "qmtl/statevector.hpp"

namespace {

using namespace qmtl;
constexpr double kPi = std::numbers::pi;

TEST(Statevector, ZeroStateHasUnitAmplitudeAtIndexZero) {
  const auto s = Statevector::zero(3);
  EXPECT_EQ(s.dimension(), 8u);
  EXPECT_EQ(s[0], cplx(1, 0));
  for (std::size_t i = 1; i < 8; ++i) EXPECT_EQ(s[i], cplx(0, 0));
}

TEST(Statevector, CapacityGuard) {
  EXPECT_THROW(Statevector::zero(0), CapacityError);
  EXPECT_THROW(Statevector::zero(kMaxQubits + 1), CapacityError);
  EXPECT_NO_THROW(Statevector::zero(1));
}

TEST(Statevector, AmplitudeLengthChecked) {
  EXPECT_THROW(Statevector(2, std::vector<cplx>(3)), DimensionError);
}

TEST(Statevector, QubitZeroIsLeastSignificantBit) {
  auto s = Statevector::zero(3);
  s.apply(OneQubitGate::x(), 0);
  EXPECT_DOUBLE_EQ(s.probability(1), 1.0);
  s.apply(OneQubitGate::x(), 2);
  EXPECT_DOUBLE_EQ(s.probability(5), 1.0);
}

TEST(Statevector, HadamardGivesEqualSuperposition) {
  auto s = Statevector::zero(1);
  s.apply(OneQubitGate::h(), 0);
  EXPECT_NEAR(s[0].real(), 1 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(s[1].real(), 1 / std::sqrt(2.0), 1e-15);
}

TEST(Statevector, RxPiIsMinusIX) {
  auto s = Statevector::zero(1);
  s.apply(OneQubitGate::rx(kPi), 0);
  EXPECT_NEAR(std::abs(s[0]), 0.0, 1e-15);
  EXPECT_NEAR(s[1].imag(), -1.0, 1e-15);
}

TEST(Statevector, CnotFlipsTargetWhenControlSet) {
  auto s = Statevector::zero(2);
  s.apply_cnot(0, 1);
  EXPECT_DOUBLE_EQ(s.probability(0), 1.0);
  s.apply(OneQubitGate::x(), 0);
  s.apply_cnot(0, 1);
  EXPECT_DOUBLE_EQ(s.probability(3), 1.0);
}

TEST(Statevector, BellState) {
  auto s = Statevector::zero(2);
  s.apply(OneQubitGate::h(), 0);
  s.apply_cnot(0, 1);
  EXPECT_NEAR(s.probability(0), 0.5, 1e-15);
  EXPECT_NEAR(s.probability(3), 0.5, 1e-15);
  EXPECT_NEAR(s.probability(1) + s.probability(2), 0.0, 1e-15);
}

TEST(Statevector, InvalidQubitIndicesRejected) {
  auto s = Statevector::zero(2);
  EXPECT_THROW(s.apply(OneQubitGate::h(), 2), IndexError);
  EXPECT_THROW(s.apply_cnot(1, 1), IndexError);
  EXPECT_THROW(s.apply_cnot(0, 5), IndexError);
}

TEST(Statevector, RotMatchesZyzProduct) {
  const double a = 0.3, b = -1.1, c = 2.4;
  const Mat2 direct = rot_matrix(a, b, c);
  const Mat2 composed = matmul(rz_matrix(c), matmul(ry_matrix(b), rz_matrix(a)));
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(std::abs(direct[i] - composed[i]), 0.0, 1e-15);
}

TEST(Statevector, EveryGateMatchesTextbookMatrix) {
  const double ang[3] = {0.7, -0.4, 1.9};
  for (auto kind : {GateKind::H, GateKind::X, GateKind::Y, GateKind::Z, GateKind::Rx, GateKind::Ry, GateKind::Rz,
                    GateKind::Rot}) {
    OneQubitGate g{kind, {ang[0], ang[1], ang[2]}};
    const auto m = g.matrix();
    const auto ref = oracle::gate_matrix(kind, ang);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(std::abs(m[i] - ref.a[i]), 0.0, 1e-15) << gate_name(kind);
  }
}

// Gate-wise evolution against the dense Kronecker-product oracle.
TEST(StatevectorProperty, RandomCircuitsMatchDenseOracle) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    RandomCircuitOptions opts;
    opts.num_qubits = 1 + seed % 4;
    opts.depth = 25;
    const auto rc = random_circuit(opts, seed);
    const auto s = evaluate(rc.circuit, rc.theta, rc.inputs);
    const auto ref = oracle::run(rc.circuit, rc.theta, rc.inputs);
    for (std::size_t i = 0; i < ref.size(); ++i) {
      EXPECT_LE(std::abs(s[i] - ref[i]), 1e-12) << "seed " << seed << " amp " << i;
    }
  }
}

TEST(StatevectorProperty, UnitaryEvolutionPreservesNorm) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RandomCircuitOptions opts;
    opts.num_qubits = 5;
    opts.depth = 60;
    const auto rc = random_circuit(opts, 100 + seed);
    EXPECT_NEAR(evaluate(rc.circuit, rc.theta, rc.inputs).norm_squared(), 1.0, 1e-12);
  }
}

}  // namespace
