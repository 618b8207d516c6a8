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

// Dense statevector over Q qubits.
//
// Basis ordering is little-endian: qubit q is bit q of the amplitude index,
// so qubit 0 is the least significant bit. Rotations follow
// R_P(theta) = exp(-i theta P / 2) and Rot(a, b, c) = Rz(c) Ry(b) Rz(a).

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qmtl/errors.hpp"

namespace qmtl {

using cplx = std::complex<double>;

inline constexpr std::size_t kMaxQubits = 24;

enum class GateKind : std::uint8_t { H, X, Y, Z, Rx, Ry, Rz, Rot, CNOT };

constexpr std::size_t gate_arity(GateKind kind) noexcept {
  return kind == GateKind::CNOT ? 2 : 1;
}

constexpr std::size_t gate_param_count(GateKind kind) noexcept {
  switch (kind) {
    case GateKind::Rx:
    case GateKind::Ry:
    case GateKind::Rz:
      return 1;
    case GateKind::Rot:
      return 3;
    default:
      return 0;
  }
}

constexpr bool is_rotation(GateKind kind) noexcept { return gate_param_count(kind) > 0; }

constexpr std::string_view gate_name(GateKind kind) noexcept {
  switch (kind) {
    case GateKind::H: return "h";
    case GateKind::X: return "x";
    case GateKind::Y: return "y";
    case GateKind::Z: return "z";
    case GateKind::Rx: return "rx";
    case GateKind::Ry: return "ry";
    case GateKind::Rz: return "rz";
    case GateKind::Rot: return "rot";
    case GateKind::CNOT: return "cx";
  }
  return "?";
}

/// Row-major 2x2 complex matrix {m00, m01, m10, m11}.
using Mat2 = std::array<cplx, 4>;

inline Mat2 matmul(const Mat2& a, const Mat2& b) {
  return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
          a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}

inline Mat2 rx_matrix(double theta) {
  const double c = std::cos(theta / 2), s = std::sin(theta / 2);
  return {cplx{c, 0}, cplx{0, -s}, cplx{0, -s}, cplx{c, 0}};
}

inline Mat2 ry_matrix(double theta) {
  const double c = std::cos(theta / 2), s = std::sin(theta / 2);
  return {cplx{c, 0}, cplx{-s, 0}, cplx{s, 0}, cplx{c, 0}};
}

inline Mat2 rz_matrix(double theta) {
  const double c = std::cos(theta / 2), s = std::sin(theta / 2);
  return {cplx{c, -s}, cplx{0, 0}, cplx{0, 0}, cplx{c, s}};
}

inline Mat2 rot_matrix(double alpha, double beta, double gamma) {
  return matmul(rz_matrix(gamma), matmul(ry_matrix(beta), rz_matrix(alpha)));
}

/// A single-qubit gate with its bound angles.
struct OneQubitGate {
  GateKind kind = GateKind::H;
  std::array<double, 3> angles{};

  static OneQubitGate h() { return {GateKind::H, {}}; }
  static OneQubitGate x() { return {GateKind::X, {}}; }
  static OneQubitGate y() { return {GateKind::Y, {}}; }
  static OneQubitGate z() { return {GateKind::Z, {}}; }
  static OneQubitGate rx(double t) { return {GateKind::Rx, {t, 0, 0}}; }
  static OneQubitGate ry(double t) { return {GateKind::Ry, {t, 0, 0}}; }
  static OneQubitGate rz(double t) { return {GateKind::Rz, {t, 0, 0}}; }
  static OneQubitGate rot(double a, double b, double c) { return {GateKind::Rot, {a, b, c}}; }

  Mat2 matrix() const {
    constexpr double r = 0.70710678118654752440;
    switch (kind) {
      case GateKind::H: return {cplx{r, 0}, cplx{r, 0}, cplx{r, 0}, cplx{-r, 0}};
      case GateKind::X: return {cplx{0, 0}, cplx{1, 0}, cplx{1, 0}, cplx{0, 0}};
      case GateKind::Y: return {cplx{0, 0}, cplx{0, -1}, cplx{0, 1}, cplx{0, 0}};
      case GateKind::Z: return {cplx{1, 0}, cplx{0, 0}, cplx{0, 0}, cplx{-1, 0}};
      case GateKind::Rx: return rx_matrix(angles[0]);
      case GateKind::Ry: return ry_matrix(angles[0]);
      case GateKind::Rz: return rz_matrix(angles[0]);
      case GateKind::Rot: return rot_matrix(angles[0], angles[1], angles[2]);
      case GateKind::CNOT: break;
    }
    throw ConfigError("CNOT is not a single-qubit gate");
  }
};

class Statevector {
 public:
  /// |0...0> on `num_qubits` qubits.
  static Statevector zero(std::size_t num_qubits) {
    check_capacity(num_qubits);
    std::vector<cplx> amps(std::size_t{1} << num_qubits, cplx{0, 0});
    amps[0] = cplx{1, 0};
    return Statevector(num_qubits, std::move(amps), Unchecked{});
  }

  Statevector(std::size_t num_qubits, std::vector<cplx> amplitudes) {
    check_capacity(num_qubits);
    if (amplitudes.size() != (std::size_t{1} << num_qubits)) {
      throw DimensionError("statevector on " + std::to_string(num_qubits) + " qubits needs " +
                           std::to_string(std::size_t{1} << num_qubits) + " amplitudes, got " +
                           std::to_string(amplitudes.size()));
    }
    num_qubits_ = num_qubits;
    amps_ = std::move(amplitudes);
  }

  std::size_t num_qubits() const noexcept { return num_qubits_; }
  std::size_t dimension() const noexcept { return amps_.size(); }
  std::span<const cplx> amplitudes() const noexcept { return amps_; }
  std::span<cplx> amplitudes() noexcept { return amps_; }
  const cplx& operator[](std::size_t i) const { return amps_[i]; }

  double norm_squared() const noexcept {
    double s = 0;
    for (const auto& a : amps_) s += std::norm(a);
    return s;
  }

  /// Probability of basis state `index`.
  double probability(std::size_t index) const { return std::norm(amps_.at(index)); }

  void apply(const OneQubitGate& gate, std::size_t qubit) {
    check_qubit(qubit);
    switch (gate.kind) {
      case GateKind::X: apply_x(qubit); return;
      case GateKind::Z: apply_phase(qubit, cplx{1, 0}, cplx{-1, 0}); return;
      case GateKind::Rz: {
        const double c = std::cos(gate.angles[0] / 2), s = std::sin(gate.angles[0] / 2);
        apply_phase(qubit, cplx{c, -s}, cplx{c, s});
        return;
      }
      default: apply_matrix(qubit, gate.matrix()); return;
    }
  }

  /// Apply an arbitrary 2x2 matrix (not checked for unitarity).
  void apply_matrix(std::size_t qubit, const Mat2& m) {
    check_qubit(qubit);
    const std::size_t stride = std::size_t{1} << qubit;
    const std::size_t dim = amps_.size();
    for (std::size_t base = 0; base < dim; base += 2 * stride) {
      for (std::size_t i = base; i < base + stride; ++i) {
        const cplx a0 = amps_[i];
        const cplx a1 = amps_[i + stride];
        amps_[i] = m[0] * a0 + m[1] * a1;
        amps_[i + stride] = m[2] * a0 + m[3] * a1;
      }
    }
  }

  void apply_cnot(std::size_t control, std::size_t target) {
    check_qubit(control);
    check_qubit(target);
    if (control == target) {
      throw IndexError("CNOT control and target must differ (both " + std::to_string(control) +
                       ")");
    }
    const std::size_t cmask = std::size_t{1} << control;
    const std::size_t tmask = std::size_t{1} << target;
    for (std::size_t i = 0; i < amps_.size(); ++i) {
      if ((i & cmask) && !(i & tmask)) std::swap(amps_[i], amps_[i | tmask]);
    }
  }

 private:
  struct Unchecked {};
  Statevector(std::size_t n, std::vector<cplx> amps, Unchecked)
      : num_qubits_(n), amps_(std::move(amps)) {}

  static void check_capacity(std::size_t num_qubits) {
    if (num_qubits < 1 || num_qubits > kMaxQubits) {
      throw CapacityError("qubit count " + std::to_string(num_qubits) + " outside [1, " +
                          std::to_string(kMaxQubits) + "]");
    }
  }

  void check_qubit(std::size_t qubit) const {
    if (qubit >= num_qubits_) {
      throw IndexError("qubit " + std::to_string(qubit) + " out of range for " +
                       std::to_string(num_qubits_) + "-qubit state");
    }
  }

  void apply_x(std::size_t qubit) {
    const std::size_t mask = std::size_t{1} << qubit;
    for (std::size_t i = 0; i < amps_.size(); ++i) {
      if (!(i & mask)) std::swap(amps_[i], amps_[i | mask]);
    }
  }

  void apply_phase(std::size_t qubit, cplx d0, cplx d1) {
    const std::size_t mask = std::size_t{1} << qubit;
    for (std::size_t i = 0; i < amps_.size(); ++i) amps_[i] *= (i & mask) ? d1 : d0;
  }

  std::size_t num_qubits_ = 0;
  std::vector<cplx> amps_;
};

inline Statevector init_zero(std::size_t num_qubits) { return Statevector::zero(num_qubits); }

inline void apply_1q(Statevector& state, const OneQubitGate& gate, std::size_t qubit) {
  state.apply(gate, qubit);
}

inline void apply_cnot(Statevector& state, std::size_t control, std::size_t target) {
  state.apply_cnot(control, target);
}

}  // namespace qmtl
