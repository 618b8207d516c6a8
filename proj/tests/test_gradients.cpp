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

#include "qmtl/gradients.hpp"
#include "qmtl/random_circuit.hpp"

namespace {

using namespace qmtl;

TEST(ParamShift, SingleRyDerivativeIsMinusSine) {
  Circuit c(1, 1);
  c.ry(0, ParamRef::trainable(0));
  for (double t : {-2.0, 0.0, 0.7, 3.0}) {
    const std::vector<double> th = {t};
    const auto j = param_shift_jacobian(c, th, {}, {PauliString::parse("Z0")});
    EXPECT_NEAR(j(0, 0), -std::sin(t), 1e-14);
  }
}

// Rz(t) then Ry(t) on |+>: <X> = cos(t)^2, so d/dt = -sin(2t). Both
// occurrences of the shared slot must be shifted and summed.
TEST(ParamShift, SharedSlotSumsOverOccurrences) {
  Circuit c(1, 1);
  c.h(0).rz(0, ParamRef::trainable(0)).ry(0, ParamRef::trainable(0));
  for (double t : {0.3, 1.1, -2.2}) {
    const std::vector<double> th = {t};
    const auto v = evaluate_expectations(c, th, {}, {PauliString::parse("X0")});
    EXPECT_NEAR(v[0], std::cos(t) * std::cos(t), 1e-14);
    const auto j = param_shift_jacobian(c, th, {}, {PauliString::parse("X0")});
    EXPECT_NEAR(j(0, 0), -std::sin(2 * t), 1e-14);
  }
}

TEST(ParamShift, InputSlotDerivatives) {
  Circuit c(1, 0, 1);
  c.rx(0, ParamRef::input(0));
  const std::vector<double> in = {0.6};
  const auto j = param_shift_jacobian(c, {}, in, {PauliString::parse("Z0")}, SlotKind::Input);
  EXPECT_NEAR(j(0, 0), -std::sin(0.6), 1e-14);
}

TEST(ParamShift, UnusedSlotHasZeroColumn) {
  Circuit c(1, 2);
  c.ry(0, ParamRef::trainable(0));
  const std::vector<double> th = {0.5, 0.9};
  const auto j = param_shift_jacobian(c, th, {}, {PauliString::parse("Z0")});
  EXPECT_EQ(j(0, 1), 0.0);
}

TEST(ParamShift, GatesOutsideTheLightConeGiveExactZeros) {
  // Ry(t1) on q1 reaches Z0 only through the CNOT; Ry(t2) on q2 never does.
  Circuit c(3, 3);
  c.ry(0, ParamRef::trainable(0)).ry(1, ParamRef::trainable(1)).cnot(1, 0).ry(2, ParamRef::trainable(2));
  const std::vector<double> th = {0.4, 1.1, -0.8};
  const std::vector<PauliString> obs = {PauliString::parse("Z0"), PauliString::parse("Z2")};
  const auto j = param_shift_jacobian(c, th, {}, obs);
  EXPECT_NE(j(0, 1), 0.0);
  EXPECT_EQ(j(0, 2), 0.0);
  EXPECT_EQ(j(1, 0), 0.0);
  EXPECT_EQ(j(1, 1), 0.0);
  EXPECT_NEAR(j(1, 2), -std::sin(-0.8), 1e-15);
  const auto fd = finite_diff_jacobian(c, th, {}, obs, 1e-6);
  EXPECT_LE(j.max_abs_diff(fd), 1e-8);
}

TEST(ParamShift, WrongShiftConstantIsDetected) {
  RandomCircuitOptions opts;
  opts.num_qubits = 3;
  const auto rc = random_circuit(opts, 11);
  ShiftOptions bad;
  bad.shift = std::numbers::pi / 3;
  EXPECT_TRUE(gradcheck(rc).passed);
  EXPECT_FALSE(gradcheck(rc, 1e-6, 1e-5, bad).passed);
}

TEST(ParamShift, EmptyCircuitIsVacuous) {
  RandomCircuitOptions opts;
  opts.depth = 0;
  const auto r = gradcheck(random_circuit(opts, 0));
  EXPECT_EQ(r.num_params, 0u);
  EXPECT_TRUE(r.passed);
}

TEST(GradientProperty, ParamShiftMatchesFiniteDifferences) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RandomCircuitOptions opts;
    opts.num_qubits = 1 + seed % 6;
    opts.depth = 30;
    opts.share_probability = 0.4;
    const auto r = gradcheck(random_circuit(opts, 2000 + seed));
    EXPECT_LE(r.max_deviation, 1e-5) << "seed " << seed;
  }
}

TEST(GradientProperty, VjpEqualsTransposedJacobianProduct) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    RandomCircuitOptions opts;
    opts.num_qubits = 3;
    const auto rc = random_circuit(opts, 50 + seed);
    std::vector<double> w;
    for (std::size_t i = 0; i < rc.observables.size(); ++i) w.push_back(0.5 - static_cast<double>(i));
    for (auto wrt : {SlotKind::Trainable, SlotKind::Input}) {
      const auto j = param_shift_jacobian(rc.circuit, rc.theta, rc.inputs, rc.observables, wrt);
      const auto v = param_shift_vjp(rc.circuit, rc.theta, rc.inputs, rc.observables, w, wrt);
      ASSERT_EQ(v.size(), j.cols());
      for (std::size_t c = 0; c < j.cols(); ++c) {
        double ref = 0;
        for (std::size_t r = 0; r < j.rows(); ++r) ref += w[r] * j(r, c);
        EXPECT_NEAR(v[c], ref, 1e-12);
      }
    }
  }
}

TEST(Vjp, MaskAndZeroWeightsSkipWork) {
  Circuit c(1, 2);
  c.ry(0, ParamRef::trainable(0)).rx(0, ParamRef::trainable(1));
  const std::vector<double> th = {0.3, 0.4};
  const std::vector<double> zero = {0.0};
  EXPECT_EQ(param_shift_vjp(c, th, {}, {PauliString::parse("Z0")}, zero), (std::vector<double>{0, 0}));
  const std::vector<std::uint8_t> mask = {1, 0};
  const std::vector<double> one = {1.0};
  const auto v = param_shift_vjp(c, th, {}, {PauliString::parse("Z0")}, one, SlotKind::Trainable, mask);
  EXPECT_NE(v[0], 0.0);
  EXPECT_EQ(v[1], 0.0);
  EXPECT_THROW(param_shift_vjp(c, th, {}, {PauliString::parse("Z0")}, std::vector<double>{1, 2}), DimensionError);
}

TEST(FiniteDiff, RejectsNonPositiveStep) {
  Circuit c(1, 1);
  c.ry(0, ParamRef::trainable(0));
  const std::vector<double> th = {0.1};
  EXPECT_THROW(finite_diff_jacobian(c, th, {}, {PauliString::parse("Z0")}, 0.0), ConfigError);
}

}  // namespace
