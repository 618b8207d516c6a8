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

// Random circuits and the parameter-shift vs finite-difference agreement check.

#include <algorithm>
#include <cstdint>
#include <numbers>
#include <vector>

#include "qmtl/circuit.hpp"
#include "qmtl/gradients.hpp"
#include "qmtl/pauli.hpp"
#include "qmtl/random.hpp"

namespace qmtl {

struct RandomCircuitOptions {
  std::size_t num_qubits = 3;
  /// Number of gates.
  std::size_t depth = 20;
  /// Probability that a rotation angle reuses an existing trainable slot.
  double share_probability = 0.3;
  /// Include rotations bound to input slots.
  bool with_inputs = true;
};

struct RandomCircuitCase {
  Circuit circuit{1};
  std::vector<double> theta;
  std::vector<double> inputs;
  std::vector<PauliString> observables;
};

/// A random mix of fixed, rotation and CNOT gates with random bindings,
/// random angles in [-pi, pi] and a few random Pauli observables.
inline RandomCircuitCase random_circuit(const RandomCircuitOptions& opts, std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t Q = opts.num_qubits;
  Circuit c(Q);
  std::size_t num_inputs = 0;
  static constexpr GateKind kinds[] = {GateKind::H,  GateKind::X,  GateKind::Y,   GateKind::Z,   GateKind::Rx,
                                       GateKind::Ry, GateKind::Rz, GateKind::Rot, GateKind::CNOT};
  auto param = [&]() -> ParamRef {
    if (opts.with_inputs && uniform01(rng) < 0.2) return ParamRef::input(num_inputs++);
    if (c.num_trainable() > 0 && uniform01(rng) < opts.share_probability) {
      return ParamRef::trainable(uniform_index(rng, c.num_trainable()));
    }
    return ParamRef::trainable(c.add_trainables(1));
  };
  for (std::size_t g = 0; g < opts.depth; ++g) {
    GateKind kind = kinds[uniform_index(rng, std::size(kinds))];
    if (kind == GateKind::CNOT && Q < 2) kind = GateKind::Ry;
    const std::size_t q = uniform_index(rng, Q);
    GateOp op{kind, {q, 0}, {}};
    if (kind == GateKind::CNOT) {
      op.qubits[1] = (q + 1 + uniform_index(rng, Q - 1)) % Q;
    }
    for (std::size_t k = 0; k < gate_param_count(kind); ++k) op.params[k] = param();
    c.require_inputs(num_inputs);
    c.add(op);
  }

  RandomCircuitCase out;
  for (std::size_t i = 0; i < c.num_trainable(); ++i) {
    out.theta.push_back(uniform(rng, -std::numbers::pi, std::numbers::pi));
  }
  for (std::size_t i = 0; i < c.num_inputs(); ++i) {
    out.inputs.push_back(uniform(rng, -std::numbers::pi, std::numbers::pi));
  }
  const std::size_t num_obs = 1 + uniform_index(rng, 3);
  for (std::size_t o = 0; o < num_obs; ++o) {
    std::vector<std::pair<std::size_t, Pauli>> terms;
    for (std::size_t q = 0; q < Q; ++q) {
      if (uniform01(rng) < 0.5) terms.emplace_back(q, static_cast<Pauli>(uniform_index(rng, 3)));
    }
    if (terms.empty()) terms.emplace_back(uniform_index(rng, Q), Pauli::Z);
    out.observables.emplace_back(terms);
  }
  out.circuit = std::move(c);
  return out;
}

struct GradcheckResult {
  std::uint64_t seed = 0;
  std::size_t num_params = 0;
  double max_deviation = 0.0;
  bool passed = true;
};

/// Max |parameter-shift - central difference| over trainable and input slots.
inline GradcheckResult gradcheck(const RandomCircuitCase& rc, double eps = 1e-6, double tol = 1e-5,
                                 const ShiftOptions& shift = {}) {
  GradcheckResult r;
  r.num_params = rc.circuit.num_trainable() + rc.circuit.num_inputs();
  for (auto wrt : {SlotKind::Trainable, SlotKind::Input}) {
    const auto ps = param_shift_jacobian(rc.circuit, rc.theta, rc.inputs, rc.observables, wrt, shift);
    const auto fd = finite_diff_jacobian(rc.circuit, rc.theta, rc.inputs, rc.observables, eps, wrt);
    if (!ps.empty()) r.max_deviation = std::max(r.max_deviation, ps.max_abs_diff(fd));
  }
  r.passed = r.max_deviation <= tol;
  return r;
}

}  // namespace qmtl
