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

// Backend-independent circuit description. Gates reference their angles
// symbolically: a trainable slot, an input-feature slot, or a constant. Ops
// apply in sequence order, so op 0 acts on |0...0> first.

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "qmtl/errors.hpp"
#include "qmtl/pauli.hpp"
#include "qmtl/statevector.hpp"

namespace qmtl {

struct ParamRef {
  enum class Source : std::uint8_t { Trainable, Input, Constant };

  Source source = Source::Constant;
  std::size_t index = 0;
  double value = 0.0;

  static ParamRef trainable(std::size_t i) { return {Source::Trainable, i, 0.0}; }
  static ParamRef input(std::size_t i) { return {Source::Input, i, 0.0}; }
  static ParamRef constant(double v) { return {Source::Constant, 0, v}; }

  bool is_trainable() const noexcept { return source == Source::Trainable; }
  bool is_input() const noexcept { return source == Source::Input; }

  double resolve(std::span<const double> theta, std::span<const double> inputs) const {
    switch (source) {
      case Source::Trainable: return theta[index];
      case Source::Input: return inputs[index];
      case Source::Constant: return value;
    }
    return 0.0;
  }

  friend bool operator==(const ParamRef&, const ParamRef&) = default;
};

struct GateOp {
  GateKind kind = GateKind::H;
  std::array<std::size_t, 2> qubits{};
  std::array<ParamRef, 3> params{};

  std::size_t num_qubits() const noexcept { return gate_arity(kind); }
  std::size_t num_params() const noexcept { return gate_param_count(kind); }
};

/// Position of one angle inside a circuit: op index and parameter slot.
struct ParamSite {
  std::size_t op = 0;
  std::size_t slot = 0;

  friend bool operator==(const ParamSite&, const ParamSite&) = default;
};

class Circuit {
 public:
  explicit Circuit(std::size_t num_qubits, std::size_t num_trainable = 0,
                   std::size_t num_inputs = 0)
      : num_qubits_(num_qubits), num_trainable_(num_trainable), num_inputs_(num_inputs) {
    if (num_qubits < 1 || num_qubits > kMaxQubits) {
      throw CapacityError("circuit qubit count " + std::to_string(num_qubits) + " outside [1, " +
                          std::to_string(kMaxQubits) + "]");
    }
  }

  std::size_t num_qubits() const noexcept { return num_qubits_; }
  std::size_t num_trainable() const noexcept { return num_trainable_; }
  std::size_t num_inputs() const noexcept { return num_inputs_; }
  const std::vector<GateOp>& ops() const noexcept { return ops_; }
  std::size_t size() const noexcept { return ops_.size(); }

  /// Declares `n` new trainable slots and returns the first new index.
  std::size_t add_trainables(std::size_t n) {
    const std::size_t first = num_trainable_;
    num_trainable_ += n;
    return first;
  }

  void require_inputs(std::size_t n) {
    if (n > num_inputs_) num_inputs_ = n;
  }

  Circuit& add(const GateOp& op) {
    validate(op);
    ops_.push_back(op);
    return *this;
  }

  Circuit& h(std::size_t q) { return add1(GateKind::H, q); }
  Circuit& x(std::size_t q) { return add1(GateKind::X, q); }
  Circuit& y(std::size_t q) { return add1(GateKind::Y, q); }
  Circuit& z(std::size_t q) { return add1(GateKind::Z, q); }
  Circuit& rx(std::size_t q, ParamRef p) { return add1(GateKind::Rx, q, p); }
  Circuit& ry(std::size_t q, ParamRef p) { return add1(GateKind::Ry, q, p); }
  Circuit& rz(std::size_t q, ParamRef p) { return add1(GateKind::Rz, q, p); }
  Circuit& rot(std::size_t q, ParamRef a, ParamRef b, ParamRef c) {
    return add(GateOp{GateKind::Rot, {q, 0}, {a, b, c}});
  }
  Circuit& cnot(std::size_t control, std::size_t target) {
    return add(GateOp{GateKind::CNOT, {control, target}, {}});
  }

  /// Appends `fragment` with its qubit i placed on `qubit_map[i]`, trainable
  /// slots shifted by `trainable_offset`, and input slots by `input_offset`.
  /// Slots the fragment declares are added to this circuit's counts.
  void append(const Circuit& fragment, const std::vector<std::size_t>& qubit_map,
              std::size_t trainable_offset, std::size_t input_offset = 0) {
    if (qubit_map.size() != fragment.num_qubits()) {
      throw DimensionError("qubit map has " + std::to_string(qubit_map.size()) +
                           " entries for a " + std::to_string(fragment.num_qubits()) +
                           "-qubit fragment");
    }
    if (trainable_offset + fragment.num_trainable() > num_trainable_) {
      num_trainable_ = trainable_offset + fragment.num_trainable();
    }
    require_inputs(input_offset + fragment.num_inputs());
    for (GateOp op : fragment.ops()) {
      for (std::size_t k = 0; k < op.num_qubits(); ++k) op.qubits[k] = qubit_map.at(op.qubits[k]);
      for (std::size_t k = 0; k < op.num_params(); ++k) {
        if (op.params[k].is_trainable()) op.params[k].index += trainable_offset;
        else if (op.params[k].is_input()) op.params[k].index += input_offset;
      }
      add(op);
    }
  }

  /// For every trainable slot, the list of sites that read it.
  std::vector<std::vector<ParamSite>> trainable_sites() const {
    return sites(ParamRef::Source::Trainable, num_trainable_);
  }

  /// For every input slot, the list of sites that read it.
  std::vector<std::vector<ParamSite>> input_sites() const {
    return sites(ParamRef::Source::Input, num_inputs_);
  }

 private:
  Circuit& add1(GateKind kind, std::size_t q, ParamRef p = {}) {
    return add(GateOp{kind, {q, 0}, {p, ParamRef{}, ParamRef{}}});
  }

  void validate(const GateOp& op) const {
    for (std::size_t k = 0; k < op.num_qubits(); ++k) {
      if (op.qubits[k] >= num_qubits_) {
        throw IndexError(std::string(gate_name(op.kind)) + " on qubit " +
                         std::to_string(op.qubits[k]) + " in a " + std::to_string(num_qubits_) +
                         "-qubit circuit");
      }
    }
    if (op.kind == GateKind::CNOT && op.qubits[0] == op.qubits[1]) {
      throw IndexError("CNOT control equals target (" + std::to_string(op.qubits[0]) + ")");
    }
    for (std::size_t k = 0; k < op.num_params(); ++k) {
      const auto& p = op.params[k];
      if (p.is_trainable() && p.index >= num_trainable_) {
        throw IndexError("trainable slot " + std::to_string(p.index) + " not declared (have " +
                         std::to_string(num_trainable_) + ")");
      }
      if (p.is_input() && p.index >= num_inputs_) {
        throw IndexError("input slot " + std::to_string(p.index) + " not declared (have " +
                         std::to_string(num_inputs_) + ")");
      }
    }
  }

  std::vector<std::vector<ParamSite>> sites(ParamRef::Source src, std::size_t n) const {
    std::vector<std::vector<ParamSite>> out(n);
    for (std::size_t i = 0; i < ops_.size(); ++i) {
      for (std::size_t k = 0; k < ops_[i].num_params(); ++k) {
        const auto& p = ops_[i].params[k];
        if (p.source == src) out[p.index].push_back({i, k});
      }
    }
    return out;
  }

  std::size_t num_qubits_;
  std::size_t num_trainable_;
  std::size_t num_inputs_;
  std::vector<GateOp> ops_;
};

/// Adds `delta` to the angle at one site during evaluation.
struct AngleShift {
  ParamSite site;
  double delta = 0.0;
};

/// Applies a single op with resolved angles; `extra` is added slot-wise.
inline void apply_op(Statevector& state, const GateOp& op, std::span<const double> theta,
                     std::span<const double> inputs, const std::array<double, 3>& extra = {}) {
  if (op.kind == GateKind::CNOT) {
    state.apply_cnot(op.qubits[0], op.qubits[1]);
    return;
  }
  OneQubitGate g{op.kind, {}};
  for (std::size_t k = 0; k < op.num_params(); ++k) {
    g.angles[k] = op.params[k].resolve(theta, inputs) + extra[k];
  }
  state.apply(g, op.qubits[0]);
}

namespace detail {

inline void check_bindings(const Circuit& c, std::span<const double> theta,
                           std::span<const double> inputs) {
  if (theta.size() != c.num_trainable()) {
    throw DimensionError("circuit declares " + std::to_string(c.num_trainable()) +
                         " trainables, got " + std::to_string(theta.size()));
  }
  if (inputs.size() != c.num_inputs()) {
    throw DimensionError("circuit declares " + std::to_string(c.num_inputs()) +
                         " inputs, got " + std::to_string(inputs.size()));
  }
}

}  // namespace detail

/// Runs the circuit on |0...0>, optionally perturbing one angle.
inline Statevector evaluate(const Circuit& circuit, std::span<const double> theta,
                            std::span<const double> inputs, const AngleShift* shift = nullptr) {
  detail::check_bindings(circuit, theta, inputs);
  Statevector state = Statevector::zero(circuit.num_qubits());
  const auto& ops = circuit.ops();
  for (std::size_t i = 0; i < ops.size(); ++i) {
    if (shift && shift->site.op == i) {
      std::array<double, 3> extra{};
      extra[shift->site.slot] = shift->delta;
      apply_op(state, ops[i], theta, inputs, extra);
    } else {
      apply_op(state, ops[i], theta, inputs);
    }
  }
  return state;
}

inline std::vector<double> evaluate_expectations(const Circuit& circuit,
                                                 std::span<const double> theta,
                                                 std::span<const double> inputs,
                                                 const std::vector<PauliString>& observables,
                                                 const AngleShift* shift = nullptr) {
  return expectations(evaluate(circuit, theta, inputs, shift), observables);
}

/// Greedy qubit-wise-commuting partition, as indices into `observables`.
/// Each observable joins the first existing group it commutes with; group
/// order follows first appearance.
inline std::vector<std::vector<std::size_t>> group_commuting_indices(
    const std::vector<PauliString>& observables) {
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < observables.size(); ++i) {
    bool placed = false;
    for (auto& g : groups) {
      bool ok = true;
      for (auto m : g) {
        if (!qubit_wise_commute(observables[i], observables[m])) {
          ok = false;
          break;
        }
      }
      if (ok) {
        g.push_back(i);
        placed = true;
        break;
      }
    }
    if (!placed) groups.push_back({i});
  }
  return groups;
}

inline std::vector<std::vector<PauliString>> group_commuting(
    const std::vector<PauliString>& observables) {
  std::vector<std::vector<PauliString>> out;
  for (const auto& g : group_commuting_indices(observables)) {
    auto& dst = out.emplace_back();
    for (auto i : g) dst.push_back(observables[i]);
  }
  return out;
}

/// Shot-sampled expectations: one basis setting per commuting group, results
/// returned in the order of `observables`.
inline std::vector<double> sampled_expectations(const Statevector& state,
                                                const std::vector<PauliString>& observables,
                                                std::size_t shots, std::uint64_t seed) {
  std::vector<double> out(observables.size());
  const auto groups = group_commuting_indices(observables);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    std::vector<PauliString> members;
    for (auto i : groups[g]) members.push_back(observables[i]);
    const auto est = sample_expectation(state, members, shots, derive_seed(seed, g));
    for (std::size_t k = 0; k < est.size(); ++k) out[groups[g][k]] = est[k];
  }
  return out;
}

}  // namespace qmtl
