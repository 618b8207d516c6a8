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

// QMTL model layout.
//
// The shared encoder puts H on every qubit, then for each of L layers:
//   Rx(Z[Q*l + j]) on qubit j,
//   Rz(th[Q*l + j]) then Ry(th[Q*l + j]) on qubit j (one shared slot),
//   CNOT(j -> j+1) for j = 0..Q-2 when entangling.
// Each task head acts on its own qubits with L_h layers of Rot (k_theta = 3)
// or Ry (k_theta = 1) per qubit followed by a CNOT ring. Readout
// expectations are the task logits, optionally calibrated.
//
// Parameter vector layout: encoder slots, head slots in declaration order,
// then calibration scalars in head order.

#include <algorithm>
#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "qmtl/circuit.hpp"
#include "qmtl/errors.hpp"
#include "qmtl/pauli.hpp"

namespace qmtl {

struct SharedEncoderConfig {
  std::size_t num_qubits = 1;
  std::size_t layers = 1;
  bool entangling = true;

  std::size_t feature_dim() const noexcept { return num_qubits * layers; }

  void validate() const {
    if (num_qubits < 1 || num_qubits > kMaxQubits) {
      throw ConfigError("encoder.Q must lie in [1, " + std::to_string(kMaxQubits) + "]");
    }
    if (layers < 1) throw ConfigError("encoder.L must be at least 1");
  }
};

enum class CalibrationKind { None, Affine, Temperature };

struct Calibration {
  CalibrationKind kind = CalibrationKind::None;
  double gamma = 1.0;  // affine scale
  double beta = 0.5;   // affine bias
  double tau = 1.0;    // temperature

  static Calibration none() { return {}; }
  static Calibration affine(double gamma = 1.0, double beta = 0.5) {
    return {CalibrationKind::Affine, gamma, beta, 1.0};
  }
  static Calibration temperature(double tau = 1.0) {
    return {CalibrationKind::Temperature, 1.0, 0.5, tau};
  }

  std::size_t num_scalars() const noexcept {
    switch (kind) {
      case CalibrationKind::Affine: return 2;
      case CalibrationKind::Temperature: return 1;
      default: return 0;
    }
  }

  /// Initial scalar values in parameter-vector order.
  std::vector<double> initial() const {
    switch (kind) {
      case CalibrationKind::Affine: return {gamma, beta};
      case CalibrationKind::Temperature: return {tau};
      default: return {};
    }
  }
};

struct TaskHeadConfig {
  std::string name;
  std::vector<std::size_t> qubits;
  std::size_t layers = 1;
  std::size_t k_theta = 3;
  std::size_t outputs = 1;
  /// Over local indices 0..S-1; empty selects default_readout(outputs, S).
  std::vector<PauliString> readout;
  Calibration calibration;

  std::size_t width() const noexcept { return qubits.size(); }
};

struct QmtlModelConfig {
  SharedEncoderConfig encoder;
  std::vector<TaskHeadConfig> heads;
};

struct ParamBudget {
  std::size_t shared = 0;
  std::vector<std::size_t> per_head;
  std::size_t total = 0;
  /// Calibration scalars; not part of `total`.
  std::size_t calibration = 0;
};

// --- readout ---------------------------------------------------------------

/// Generic readout rule: every single-qubit Z, then the nearest-neighbour ZZ
/// ring, then the all-X string, then single X and single Y, truncated to r.
inline std::vector<PauliString> generic_readout(std::size_t r, std::size_t width) {
  if (width < 1) throw ConfigError("readout register must have at least one qubit");
  std::vector<PauliString> cand;
  for (std::size_t q = 0; q < width; ++q) cand.push_back(PauliString::single(q, Pauli::Z));
  if (width >= 2) {
    const std::size_t pairs = width == 2 ? 1 : width;
    for (std::size_t q = 0; q < pairs; ++q) {
      cand.push_back(PauliString({{q, Pauli::Z}, {(q + 1) % width, Pauli::Z}}));
    }
  }
  std::vector<std::size_t> all(width);
  for (std::size_t q = 0; q < width; ++q) all[q] = q;
  cand.push_back(PauliString::uniform(Pauli::X, all));
  for (std::size_t q = 0; q < width && width > 1; ++q) cand.push_back(PauliString::single(q, Pauli::X));
  for (std::size_t q = 0; q < width; ++q) cand.push_back(PauliString::single(q, Pauli::Y));
  if (r > cand.size()) {
    throw ConfigError("cannot build " + std::to_string(r) + " readout observables on " +
                      std::to_string(width) + " qubit(s)");
  }
  cand.erase(cand.begin() + static_cast<std::ptrdiff_t>(r), cand.end());
  return cand;
}

/// Readout sets for the (outputs, width) pairs used by the reference
/// configurations: (1,1), (3,2), (9,4).
inline std::vector<PauliString> default_readout(std::size_t r, std::size_t width) {
  using P = Pauli;
  if (r == 1 && width == 1) return {PauliString::single(0, P::Z)};
  if (r == 3 && width == 2) {
    return {PauliString::single(0, P::Z), PauliString::single(1, P::Z),
            PauliString({{0, P::X}, {1, P::X}})};
  }
  if (r == 9 && width == 4) return generic_readout(9, 4);
  throw ConfigError("no default readout for " + std::to_string(r) + " outputs on " +
                    std::to_string(width) + " qubit(s); supply a custom readout");
}

/// default_readout when defined, otherwise the generic rule.
inline std::vector<PauliString> resolve_readout(const TaskHeadConfig& head) {
  if (!head.readout.empty()) return head.readout;
  try {
    return default_readout(head.outputs, head.width());
  } catch (const ConfigError&) {
    return generic_readout(head.outputs, head.width());
  }
}

// --- builders --------------------------------------------------------------

inline Circuit build_shared_encoder(const SharedEncoderConfig& cfg) {
  cfg.validate();
  const std::size_t Q = cfg.num_qubits;
  Circuit c(Q, Q * cfg.layers, Q * cfg.layers);
  for (std::size_t j = 0; j < Q; ++j) c.h(j);
  for (std::size_t l = 0; l < cfg.layers; ++l) {
    for (std::size_t j = 0; j < Q; ++j) c.rx(j, ParamRef::input(Q * l + j));
    for (std::size_t j = 0; j < Q; ++j) {
      const auto slot = ParamRef::trainable(Q * l + j);
      c.rz(j, slot);
      c.ry(j, slot);
    }
    if (cfg.entangling) {
      for (std::size_t j = 0; j + 1 < Q; ++j) c.cnot(j, j + 1);
    }
  }
  return c;
}

inline void validate_head(const TaskHeadConfig& h) {
  const std::string who = "head '" + h.name + "': ";
  if (h.qubits.empty()) throw ConfigError(who + "needs at least one qubit");
  if (std::set<std::size_t>(h.qubits.begin(), h.qubits.end()).size() != h.qubits.size()) {
    throw ConfigError(who + "repeats a qubit");
  }
  if (h.k_theta != 1 && h.k_theta != 3) throw ConfigError(who + "k_theta must be 1 or 3");
  if (h.outputs < 1) throw ConfigError(who + "outputs must be at least 1");
  if (!h.readout.empty()) {
    if (h.readout.size() != h.outputs) {
      throw ConfigError(who + "readout has " + std::to_string(h.readout.size()) +
                        " observables for " + std::to_string(h.outputs) + " outputs");
    }
    for (const auto& o : h.readout) {
      if (o.max_qubit() >= h.width()) {
        throw ConfigError(who + "readout " + o.to_string() + " exceeds local register");
      }
    }
  }
}

/// Head subcircuit on local qubits 0..S-1.
inline Circuit build_task_head(const TaskHeadConfig& cfg) {
  validate_head(cfg);
  const std::size_t S = cfg.width();
  Circuit c(S);
  for (std::size_t l = 0; l < cfg.layers; ++l) {
    for (std::size_t j = 0; j < S; ++j) {
      if (cfg.k_theta == 3) {
        const auto first = c.add_trainables(3);
        c.rot(j, ParamRef::trainable(first), ParamRef::trainable(first + 1),
              ParamRef::trainable(first + 2));
      } else {
        c.ry(j, ParamRef::trainable(c.add_trainables(1)));
      }
    }
    if (S >= 2) {
      for (std::size_t j = 0; j < S; ++j) {
        // A 2-qubit ring is CNOT(0,1) then CNOT(1,0).
        c.cnot(j, (j + 1) % S);
      }
    }
  }
  return c;
}

// --- assembly --------------------------------------------------------------

struct TaskOutput {
  std::string name;
  /// Readout over global qubit indices.
  std::vector<PauliString> observables;
  Calibration calibration;
  /// First calibration scalar in the full parameter vector.
  std::size_t calibration_offset = 0;
  /// First trainable slot of this head and one past its last.
  std::size_t param_begin = 0;
  std::size_t param_end = 0;
};

struct AssembledModel {
  Circuit circuit{1};
  std::vector<TaskOutput> outputs;
  std::size_t num_calibration = 0;

  std::size_t num_circuit_params() const noexcept { return circuit.num_trainable(); }
  std::size_t num_params() const noexcept { return circuit.num_trainable() + num_calibration; }
  std::size_t feature_dim() const noexcept { return circuit.num_inputs(); }

  /// All readout observables, task by task.
  std::vector<PauliString> all_observables() const {
    std::vector<PauliString> out;
    for (const auto& t : outputs) out.insert(out.end(), t.observables.begin(), t.observables.end());
    return out;
  }

  /// Initial calibration scalars in parameter order.
  std::vector<double> initial_calibration() const {
    std::vector<double> out;
    for (const auto& t : outputs) {
      const auto v = t.calibration.initial();
      out.insert(out.end(), v.begin(), v.end());
    }
    return out;
  }
};

inline void validate_model(const QmtlModelConfig& m) {
  m.encoder.validate();
  std::set<std::size_t> used;
  for (const auto& h : m.heads) {
    validate_head(h);
    for (auto q : h.qubits) {
      if (q >= m.encoder.num_qubits) {
        throw ConfigError("head '" + h.name + "' uses qubit " + std::to_string(q) +
                          " outside the " + std::to_string(m.encoder.num_qubits) +
                          "-qubit register");
      }
      if (!used.insert(q).second) {
        throw ConfigError("head '" + h.name + "' overlaps another head on qubit " +
                          std::to_string(q));
      }
    }
  }
}

inline AssembledModel assemble(const QmtlModelConfig& model) {
  validate_model(model);
  AssembledModel out;
  out.circuit = build_shared_encoder(model.encoder);
  std::size_t calib = 0;
  for (const auto& h : model.heads) {
    const Circuit frag = build_task_head(h);
    const std::size_t offset = out.circuit.num_trainable();
    out.circuit.append(frag, h.qubits, offset);
    TaskOutput t;
    t.name = h.name;
    for (const auto& o : resolve_readout(h)) t.observables.push_back(o.remapped(h.qubits));
    t.calibration = h.calibration;
    t.calibration_offset = calib;
    t.param_begin = offset;
    t.param_end = out.circuit.num_trainable();
    calib += h.calibration.num_scalars();
    out.outputs.push_back(std::move(t));
  }
  out.num_calibration = calib;
  for (auto& t : out.outputs) t.calibration_offset += out.circuit.num_trainable();
  return out;
}

using TaskLogits = std::vector<std::vector<double>>;

/// Applies each head's calibration to raw expectations (task-major).
inline TaskLogits calibrate(const AssembledModel& model, std::span<const double> params,
                            std::span<const double> raw) {
  TaskLogits out;
  std::size_t k = 0;
  for (const auto& t : model.outputs) {
    auto& v = out.emplace_back();
    for (std::size_t i = 0; i < t.observables.size(); ++i, ++k) {
      const double z = raw[k];
      switch (t.calibration.kind) {
        case CalibrationKind::Affine:
          v.push_back(params[t.calibration_offset + 1] + params[t.calibration_offset] * z);
          break;
        case CalibrationKind::Temperature:
          v.push_back(params[t.calibration_offset] * z);
          break;
        default: v.push_back(z); break;
      }
    }
  }
  return out;
}

/// Per-task logits for one feature vector. `params` holds circuit slots
/// followed by calibration scalars.
inline TaskLogits forward(const AssembledModel& model, std::span<const double> params,
                          std::span<const double> features) {
  if (params.size() != model.num_params()) {
    throw DimensionError("model has " + std::to_string(model.num_params()) + " parameters, got " +
                         std::to_string(params.size()));
  }
  const auto raw = evaluate_expectations(model.circuit, params.first(model.num_circuit_params()),
                                         features, model.all_observables());
  return calibrate(model, params, raw);
}

// --- parameter accounting --------------------------------------------------

inline ParamBudget count_params_quantum(const QmtlModelConfig& model) {
  ParamBudget b;
  b.shared = model.encoder.num_qubits * model.encoder.layers;
  b.total = b.shared;
  for (const auto& h : model.heads) {
    const std::size_t p = h.k_theta * h.width() * h.layers;
    b.per_head.push_back(p);
    b.total += p;
    b.calibration += h.calibration.num_scalars();
  }
  return b;
}

/// Independent linear heads on a d-dimensional feature: sum_t r_t (d + 1).
inline std::size_t count_params_classical(std::size_t d, std::span<const std::size_t> outputs) {
  std::size_t total = 0;
  for (auto r : outputs) total += r * (d + 1);
  return total;
}

struct ScalingRow {
  std::size_t tasks = 0;
  std::size_t feature_dim = 0;
  std::size_t classical = 0;
  std::size_t quantum = 0;
  double ratio = 0.0;
};

/// Capacity-matched scaling: Q = S*T, d = Q*L, P_C = T r (d+1),
/// P_Q = S T (L + k_theta L_h).
inline std::vector<ScalingRow> scaling_table(std::span<const std::size_t> task_counts,
                                             std::size_t r, std::size_t layers,
                                             std::size_t k_theta, std::size_t head_layers,
                                             std::size_t width) {
  if (r < 1 || layers < 1 || k_theta < 1 || width < 1) {
    throw ConfigError("scaling table parameters must be positive");
  }
  std::vector<ScalingRow> rows;
  for (auto T : task_counts) {
    if (T < 1) throw ConfigError("task count must be positive");
    ScalingRow row;
    row.tasks = T;
    row.feature_dim = width * T * layers;
    row.classical = T * r * (row.feature_dim + 1);
    row.quantum = width * T * (layers + k_theta * head_layers);
    row.ratio = static_cast<double>(row.quantum) / static_cast<double>(row.classical);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace qmtl
