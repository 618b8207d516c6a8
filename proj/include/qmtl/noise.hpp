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

// Depolarizing noise by Pauli-twirl trajectories. After each single-qubit
// gate a uniformly chosen X, Y or Z hits the gate's qubit with probability
// p1; after each CNOT one of the 15 non-identity two-qubit Paulis hits the
// gate's qubits with probability p2. Averaging exact expectations over the
// trajectories estimates the channel-averaged expectation.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qmtl/circuit.hpp"
#include "qmtl/errors.hpp"
#include "qmtl/random.hpp"

namespace qmtl {

struct NoiseSpec {
  double p1 = 0.0;
  double p2 = 0.0;
  std::size_t num_trajectories = 1000;
  std::uint64_t seed = 0;

  bool noiseless() const noexcept { return p1 == 0.0 && p2 == 0.0; }

  void validate() const {
    if (!(p1 >= 0.0 && p1 <= 1.0)) throw ConfigError("p1 must lie in [0, 1]");
    if (!(p2 >= 0.0 && p2 <= 1.0)) throw ConfigError("p2 must lie in [0, 1]");
    if (num_trajectories < 1) throw ConfigError("num_trajectories must be at least 1");
  }
};

struct NoisyEstimate {
  std::vector<double> mean;
  /// Standard error of each mean over trajectories (0 when noiseless).
  std::vector<double> std_error;
};

namespace detail {

inline void apply_pauli(Statevector& s, unsigned which, std::size_t q) {
  switch (which) {
    case 1: s.apply(OneQubitGate::x(), q); break;
    case 2: s.apply(OneQubitGate::y(), q); break;
    case 3: s.apply(OneQubitGate::z(), q); break;
    default: break;
  }
}

}  // namespace detail

inline NoisyEstimate noisy_expectation_stats(const Circuit& circuit,
                                             std::span<const double> theta,
                                             std::span<const double> inputs,
                                             const std::vector<PauliString>& observables,
                                             const NoiseSpec& noise) {
  noise.validate();
  detail::check_bindings(circuit, theta, inputs);
  const std::size_t m = observables.size();
  if (noise.noiseless()) {
    return {evaluate_expectations(circuit, theta, inputs, observables),
            std::vector<double>(m, 0.0)};
  }

  std::vector<double> sum(m, 0.0), sum_sq(m, 0.0);
  for (std::size_t t = 0; t < noise.num_trajectories; ++t) {
    Rng rng(derive_seed(noise.seed, t));
    Statevector state = Statevector::zero(circuit.num_qubits());
    for (const auto& op : circuit.ops()) {
      apply_op(state, op, theta, inputs);
      if (op.kind == GateKind::CNOT) {
        if (noise.p2 > 0.0 && uniform01(rng) < noise.p2) {
          const auto k = static_cast<unsigned>(uniform_index(rng, 15)) + 1;  // 1..15
          detail::apply_pauli(state, k & 3u, op.qubits[0]);
          detail::apply_pauli(state, k >> 2, op.qubits[1]);
        }
      } else if (noise.p1 > 0.0 && uniform01(rng) < noise.p1) {
        const auto k = static_cast<unsigned>(uniform_index(rng, 3)) + 1;
        detail::apply_pauli(state, k, op.qubits[0]);
      }
    }
    for (std::size_t i = 0; i < m; ++i) {
      const double v = expectation(state, observables[i]);
      sum[i] += v;
      sum_sq[i] += v * v;
    }
  }

  const double n = static_cast<double>(noise.num_trajectories);
  NoisyEstimate est{std::vector<double>(m), std::vector<double>(m)};
  for (std::size_t i = 0; i < m; ++i) {
    est.mean[i] = sum[i] / n;
    const double var = n > 1 ? std::max(0.0, (sum_sq[i] - n * est.mean[i] * est.mean[i]) / (n - 1))
                             : 0.0;
    est.std_error[i] = std::sqrt(var / n);
  }
  return est;
}

/// Monte-Carlo channel-averaged expectations. With p1 = p2 = 0 the result is
/// exactly the noiseless expectation vector.
inline std::vector<double> noisy_expectations(const Circuit& circuit,
                                              std::span<const double> theta,
                                              std::span<const double> inputs,
                                              const std::vector<PauliString>& observables,
                                              const NoiseSpec& noise) {
  return noisy_expectation_stats(circuit, theta, inputs, observables, noise).mean;
}

}  // namespace qmtl
