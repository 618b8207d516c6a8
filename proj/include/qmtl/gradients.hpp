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
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "qmtl/circuit.hpp"
#include "qmtl/errors.hpp"

namespace qmtl {

/// Dense row-major matrix of d(observable)/d(parameter).
class Jacobian {
 public:
  Jacobian() = default;
  Jacobian(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  double max_abs_diff(const Jacobian& other) const {
    if (rows_ != other.rows_ || cols_ != other.cols_) throw DimensionError("jacobian shapes differ");
    double m = 0;
    for (std::size_t i = 0; i < data_.size(); ++i) m = std::max(m, std::abs(data_[i] - other.data_[i]));
    return m;
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

/// Which symbolic slots a derivative is taken with respect to.
enum class SlotKind { Trainable, Input };

struct ShiftOptions {
  /// Shift applied on each side. The estimator is (f(+s) - f(-s)) / 2, which
  /// is exact only for s = pi/2; other values exist for negative controls.
  double shift = std::numbers::pi / 2;
};

namespace detail {

inline void check_shiftable(const Circuit& c, const std::vector<std::vector<ParamSite>>& sites) {
  for (const auto& slot : sites) {
    for (const auto& s : slot) {
      if (!is_rotation(c.ops()[s.op].kind)) {
        throw UnsupportedGateError("slot bound to non-rotation gate " +
                                   std::string(gate_name(c.ops()[s.op].kind)));
      }
    }
  }
}

/// in_cone[k] is true when op k can influence `obs`: the op touches a qubit
/// of the observable's support propagated backwards through the circuit.
/// Ops outside the cone have an exactly zero derivative.
inline std::vector<bool> light_cone(const Circuit& c, const PauliString& obs) {
  std::vector<bool> live(c.num_qubits(), false);
  for (const auto& [q, p] : obs.terms()) {
    if (q < live.size()) live[q] = true;
  }
  std::vector<bool> in_cone(c.size(), false);
  for (std::size_t k = c.size(); k-- > 0;) {
    const auto& op = c.ops()[k];
    bool hit = false;
    for (std::size_t i = 0; i < op.num_qubits(); ++i) hit = hit || live[op.qubits[i]];
    if (!hit) continue;
    in_cone[k] = true;
    for (std::size_t i = 0; i < op.num_qubits(); ++i) live[op.qubits[i]] = true;
  }
  return in_cone;
}

}  // namespace detail

/// Parameter-shift Jacobian. A slot read by m sites is differentiated by
/// shifting each site separately and summing (product rule), costing 2m
/// circuit runs.
inline Jacobian param_shift_jacobian(const Circuit& circuit, std::span<const double> theta,
                                     std::span<const double> inputs,
                                     const std::vector<PauliString>& observables,
                                     SlotKind wrt = SlotKind::Trainable,
                                     const ShiftOptions& opts = {}) {
  detail::check_bindings(circuit, theta, inputs);
  const auto sites = wrt == SlotKind::Trainable ? circuit.trainable_sites() : circuit.input_sites();
  detail::check_shiftable(circuit, sites);
  Jacobian jac(observables.size(), sites.size());
  std::vector<std::vector<bool>> cones;
  for (const auto& o : observables) cones.push_back(detail::light_cone(circuit, o));
  for (std::size_t j = 0; j < sites.size(); ++j) {
    for (const auto& site : sites[j]) {
      bool any = false;
      for (const auto& cone : cones) any = any || cone[site.op];
      if (!any) continue;
      AngleShift plus{site, opts.shift}, minus{site, -opts.shift};
      const auto fp = evaluate_expectations(circuit, theta, inputs, observables, &plus);
      const auto fm = evaluate_expectations(circuit, theta, inputs, observables, &minus);
      for (std::size_t r = 0; r < observables.size(); ++r) {
        if (cones[r][site.op]) jac(r, j) += 0.5 * (fp[r] - fm[r]);
      }
    }
  }
  return jac;
}

/// Central finite differences on the slot values themselves.
inline Jacobian finite_diff_jacobian(const Circuit& circuit, std::span<const double> theta,
                                     std::span<const double> inputs,
                                     const std::vector<PauliString>& observables, double eps,
                                     SlotKind wrt = SlotKind::Trainable) {
  if (!(eps > 0)) throw ConfigError("finite-difference step must be positive");
  detail::check_bindings(circuit, theta, inputs);
  std::vector<double> th(theta.begin(), theta.end());
  std::vector<double> in(inputs.begin(), inputs.end());
  auto& vec = wrt == SlotKind::Trainable ? th : in;
  Jacobian jac(observables.size(), vec.size());
  for (std::size_t j = 0; j < vec.size(); ++j) {
    const double orig = vec[j];
    vec[j] = orig + eps;
    const auto fp = evaluate_expectations(circuit, th, in, observables);
    vec[j] = orig - eps;
    const auto fm = evaluate_expectations(circuit, th, in, observables);
    vec[j] = orig;
    for (std::size_t r = 0; r < observables.size(); ++r) jac(r, j) = (fp[r] - fm[r]) / (2 * eps);
  }
  return jac;
}

/// Vector-Jacobian product w^T J by parameter shift, without materialising J.
/// Observables with zero weight are not evaluated; slots whose mask entry is
/// 0 are skipped and left at zero.
inline std::vector<double> param_shift_vjp(const Circuit& circuit, std::span<const double> theta,
                                           std::span<const double> inputs,
                                           const std::vector<PauliString>& observables,
                                           std::span<const double> weights,
                                           SlotKind wrt = SlotKind::Trainable,
                                           std::span<const std::uint8_t> slot_mask = {}) {
  if (weights.size() != observables.size()) {
    throw DimensionError("vjp weights do not match observable count");
  }
  std::vector<PauliString> active;
  std::vector<double> w;
  for (std::size_t i = 0; i < observables.size(); ++i) {
    if (weights[i] != 0.0) {
      active.push_back(observables[i]);
      w.push_back(weights[i]);
    }
  }
  const auto sites = wrt == SlotKind::Trainable ? circuit.trainable_sites() : circuit.input_sites();
  std::vector<double> grad(sites.size(), 0.0);
  if (active.empty()) return grad;
  detail::check_bindings(circuit, theta, inputs);
  detail::check_shiftable(circuit, sites);
  constexpr double kShift = std::numbers::pi / 2;
  if (!slot_mask.empty() && slot_mask.size() != sites.size()) {
    throw DimensionError("vjp slot mask does not match slot count");
  }
  std::vector<std::vector<bool>> cones;
  for (const auto& o : active) cones.push_back(detail::light_cone(circuit, o));
  for (std::size_t j = 0; j < sites.size(); ++j) {
    if (!slot_mask.empty() && !slot_mask[j]) continue;
    for (const auto& site : sites[j]) {
      bool any = false;
      for (const auto& cone : cones) any = any || cone[site.op];
      if (!any) continue;
      AngleShift plus{site, kShift}, minus{site, -kShift};
      const auto sp = evaluate(circuit, theta, inputs, &plus);
      const auto sm = evaluate(circuit, theta, inputs, &minus);
      double acc = 0;
      for (std::size_t r = 0; r < active.size(); ++r) {
        if (cones[r][site.op]) acc += w[r] * (expectation(sp, active[r]) - expectation(sm, active[r]));
      }
      grad[j] += 0.5 * acc;
    }
  }
  return grad;
}

}  // namespace qmtl
