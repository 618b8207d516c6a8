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
#include <bit>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "qmtl/errors.hpp"
#include "qmtl/random.hpp"
#include "qmtl/statevector.hpp"

namespace qmtl {

enum class Pauli : std::uint8_t { X, Y, Z };

constexpr char pauli_char(Pauli p) noexcept {
  return p == Pauli::X ? 'X' : (p == Pauli::Y ? 'Y' : 'Z');
}

/// Tensor product of single-qubit Paulis on distinct qubits, stored sorted by
/// qubit index. Identity factors are implicit.
class PauliString {
 public:
  using Term = std::pair<std::size_t, Pauli>;

  PauliString(std::initializer_list<Term> terms) : PauliString(std::vector<Term>(terms)) {}

  explicit PauliString(std::vector<Term> terms) : terms_(std::move(terms)) {
    if (terms_.empty()) throw ConfigError("Pauli string must act on at least one qubit");
    std::sort(terms_.begin(), terms_.end(),
              [](const Term& a, const Term& b) { return a.first < b.first; });
    for (std::size_t i = 1; i < terms_.size(); ++i) {
      if (terms_[i].first == terms_[i - 1].first) {
        throw ConfigError("Pauli string repeats qubit " + std::to_string(terms_[i].first));
      }
    }
  }

  static PauliString single(std::size_t qubit, Pauli p) { return PauliString({{qubit, p}}); }

  /// Same axis on every listed qubit, e.g. uniform(Pauli::X, {0,1}) = X0 X1.
  static PauliString uniform(Pauli p, const std::vector<std::size_t>& qubits) {
    std::vector<Term> t;
    t.reserve(qubits.size());
    for (auto q : qubits) t.emplace_back(q, p);
    return PauliString(std::move(t));
  }

  /// Parses "X0 X1", "Z3", "Z0Z1".
  static PauliString parse(const std::string& text) {
    std::vector<Term> t;
    std::size_t i = 0;
    while (i < text.size()) {
      const char c = text[i];
      if (c == ' ' || c == '*') {
        ++i;
        continue;
      }
      Pauli p;
      if (c == 'X' || c == 'x') p = Pauli::X;
      else if (c == 'Y' || c == 'y') p = Pauli::Y;
      else if (c == 'Z' || c == 'z') p = Pauli::Z;
      else throw ConfigError("bad Pauli string '" + text + "'");
      ++i;
      std::size_t start = i;
      while (i < text.size() && text[i] >= '0' && text[i] <= '9') ++i;
      if (start == i) throw ConfigError("missing qubit index in Pauli string '" + text + "'");
      t.emplace_back(std::stoul(text.substr(start, i - start)), p);
    }
    return PauliString(std::move(t));
  }

  const std::vector<Term>& terms() const noexcept { return terms_; }
  std::size_t weight() const noexcept { return terms_.size(); }
  std::size_t max_qubit() const noexcept { return terms_.back().first; }

  /// Whether the string acts on `qubit`; writes the axis when it does.
  bool acts_on(std::size_t qubit, Pauli* axis = nullptr) const {
    for (const auto& [q, p] : terms_) {
      if (q == qubit) {
        if (axis) *axis = p;
        return true;
      }
    }
    return false;
  }

  /// Relabels qubit i to map[i].
  PauliString remapped(const std::vector<std::size_t>& map) const {
    std::vector<Term> t;
    t.reserve(terms_.size());
    for (const auto& [q, p] : terms_) {
      if (q >= map.size()) {
        throw IndexError("Pauli index " + std::to_string(q) + " outside local register of size " +
                         std::to_string(map.size()));
      }
      t.emplace_back(map[q], p);
    }
    return PauliString(std::move(t));
  }

  std::string to_string() const {
    std::string s;
    for (const auto& [q, p] : terms_) {
      if (!s.empty()) s += ' ';
      s += pauli_char(p);
      s += std::to_string(q);
    }
    return s;
  }

  friend bool operator==(const PauliString&, const PauliString&) = default;

 private:
  std::vector<Term> terms_;
};

/// True iff on every shared qubit both strings use the same axis.
inline bool qubit_wise_commute(const PauliString& a, const PauliString& b) {
  const auto& ta = a.terms();
  const auto& tb = b.terms();
  std::size_t i = 0, j = 0;
  while (i < ta.size() && j < tb.size()) {
    if (ta[i].first < tb[j].first) ++i;
    else if (tb[j].first < ta[i].first) ++j;
    else {
      if (ta[i].second != tb[j].second) return false;
      ++i;
      ++j;
    }
  }
  return true;
}

namespace detail {

inline void check_observable(const Statevector& state, const PauliString& obs) {
  if (obs.max_qubit() >= state.num_qubits()) {
    throw IndexError("observable " + obs.to_string() + " addresses qubit beyond " +
                     std::to_string(state.num_qubits()) + "-qubit state");
  }
}

}  // namespace detail

/// Exact <psi|P|psi>.
///
/// P|s> = i^{nY} (-1)^{|s & zmask|} |s ^ xmask>, with Y counted in both masks.
inline double expectation(const Statevector& state, const PauliString& obs) {
  detail::check_observable(state, obs);
  std::size_t xmask = 0, zmask = 0, ny = 0;
  for (const auto& [q, p] : obs.terms()) {
    const std::size_t bit = std::size_t{1} << q;
    if (p != Pauli::Z) xmask |= bit;
    if (p != Pauli::X) zmask |= bit;
    if (p == Pauli::Y) ++ny;
  }
  const auto amps = state.amplitudes();
  cplx acc{0, 0};
  for (std::size_t s = 0; s < amps.size(); ++s) {
    const cplx term = std::conj(amps[s ^ xmask]) * amps[s];
    if (std::popcount(s & zmask) & 1) acc -= term;
    else acc += term;
  }
  static constexpr cplx kPhase[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return (acc * kPhase[ny % 4]).real();
}

inline std::vector<double> expectations(const Statevector& state,
                                        const std::vector<PauliString>& observables) {
  std::vector<double> out;
  out.reserve(observables.size());
  for (const auto& o : observables) out.push_back(expectation(state, o));
  return out;
}

inline void check_commuting_group(const std::vector<PauliString>& group) {
  for (std::size_t i = 0; i < group.size(); ++i) {
    for (std::size_t j = i + 1; j < group.size(); ++j) {
      if (!qubit_wise_commute(group[i], group[j])) {
        throw GroupingError(group[i].to_string() + " and " + group[j].to_string() +
                            " are not qubit-wise commuting");
      }
    }
  }
}

/// Shot-based estimates for a qubit-wise commuting group, all from one basis
/// setting. The state is rotated so every group axis becomes Z, then `shots`
/// basis states are drawn.
inline std::vector<double> sample_expectation(const Statevector& state,
                                              const std::vector<PauliString>& group,
                                              std::size_t shots, std::uint64_t seed) {
  if (shots == 0) throw ConfigError("shots must be positive");
  check_commuting_group(group);
  for (const auto& o : group) detail::check_observable(state, o);

  Statevector rotated = state;
  std::vector<bool> done(state.num_qubits(), false);
  for (const auto& o : group) {
    for (const auto& [q, p] : o.terms()) {
      if (done[q]) continue;
      done[q] = true;
      if (p == Pauli::X) {
        rotated.apply(OneQubitGate::h(), q);
      } else if (p == Pauli::Y) {
        // S^dagger then H maps the Y eigenbasis onto Z.
        rotated.apply_matrix(q, Mat2{cplx{1, 0}, cplx{0, 0}, cplx{0, 0}, cplx{0, -1}});
        rotated.apply(OneQubitGate::h(), q);
      }
    }
  }

  const auto amps = rotated.amplitudes();
  std::vector<double> cdf(amps.size());
  double run = 0;
  for (std::size_t s = 0; s < amps.size(); ++s) {
    run += std::norm(amps[s]);
    cdf[s] = run;
  }

  std::vector<std::size_t> masks;
  for (const auto& o : group) {
    std::size_t m = 0;
    for (const auto& [q, p] : o.terms()) m |= std::size_t{1} << q;
    masks.push_back(m);
  }

  Rng rng(seed);
  std::vector<long long> sums(group.size(), 0);
  for (std::size_t k = 0; k < shots; ++k) {
    const double u = uniform01(rng) * run;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    std::size_t s = static_cast<std::size_t>(it - cdf.begin());
    if (s >= cdf.size()) s = cdf.size() - 1;
    for (std::size_t g = 0; g < masks.size(); ++g) sums[g] += (std::popcount(s & masks[g]) & 1) ? -1 : 1;
  }
  std::vector<double> out;
  out.reserve(group.size());
  for (auto v : sums) out.push_back(static_cast<double>(v) / static_cast<double>(shots));
  return out;
}

}  // namespace qmtl
