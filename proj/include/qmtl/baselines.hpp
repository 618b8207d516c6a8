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

// Comparison heads: independent linear maps per task, and a hybrid
// quantum-classical head (affine bottleneck to 3 angles, a small variational
// circuit, scaled per-qubit <Z> features, then per-task linear maps).

#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "qmtl/circuit.hpp"
#include "qmtl/errors.hpp"

namespace qmtl {

/// W (r x d, row-major) times Z plus b.
inline std::vector<double> classical_head_forward(std::span<const double> W,
                                                  std::span<const double> b,
                                                  std::span<const double> Z) {
  const std::size_t r = b.size();
  const std::size_t d = Z.size();
  if (W.size() != r * d) {
    throw DimensionError("weight matrix has " + std::to_string(W.size()) + " entries, expected " +
                         std::to_string(r) + "x" + std::to_string(d));
  }
  std::vector<double> out(r);
  for (std::size_t i = 0; i < r; ++i) {
    double acc = b[i];
    for (std::size_t j = 0; j < d; ++j) acc += W[i * d + j] * Z[j];
    out[i] = acc;
  }
  return out;
}

struct HqnnConfig {
  std::size_t feature_dim = 1;
  std::size_t qubits = 4;
  std::vector<std::size_t> outputs;
  std::size_t repetitions = 3;

  static constexpr std::size_t kBottleneck = 3;

  void validate() const {
    if (feature_dim < 1) throw ConfigError("hqnn feature dimension must be positive");
    if (qubits < kBottleneck || qubits > kMaxQubits) {
      throw ConfigError("hqnn needs between 3 and " + std::to_string(kMaxQubits) + " qubits");
    }
    if (repetitions < 1) throw ConfigError("hqnn needs at least one repetition");
    for (auto r : outputs) {
      if (r < 1) throw ConfigError("hqnn task outputs must be positive");
    }
  }
};

struct HqnnBudget {
  std::size_t projection = 0;
  std::size_t circuit = 0;
  std::size_t scale = 1;
  std::size_t heads = 0;

  std::size_t classical() const noexcept { return projection + scale + heads; }
  std::size_t total() const noexcept { return classical() + circuit; }
};

inline HqnnBudget count_params_hqnn(const HqnnConfig& cfg) {
  HqnnBudget b;
  b.projection = cfg.feature_dim * HqnnConfig::kBottleneck + HqnnConfig::kBottleneck;
  b.circuit = cfg.repetitions * cfg.qubits * 3;
  for (auto r : cfg.outputs) b.heads += r * (cfg.qubits + 1);
  return b;
}

/// The hybrid head's circuit: per repetition, Ry(in[i]) on qubits 0..2, a
/// Rot on every qubit, then a CNOT ring.
inline Circuit build_hqnn_circuit(const HqnnConfig& cfg) {
  cfg.validate();
  const std::size_t q = cfg.qubits;
  Circuit c(q, 0, HqnnConfig::kBottleneck);
  for (std::size_t rep = 0; rep < cfg.repetitions; ++rep) {
    for (std::size_t i = 0; i < HqnnConfig::kBottleneck; ++i) c.ry(i, ParamRef::input(i));
    for (std::size_t j = 0; j < q; ++j) {
      const auto first = c.add_trainables(3);
      c.rot(j, ParamRef::trainable(first), ParamRef::trainable(first + 1),
            ParamRef::trainable(first + 2));
    }
    for (std::size_t j = 0; j < q; ++j) c.cnot(j, (j + 1) % q);
  }
  return c;
}

}  // namespace qmtl
