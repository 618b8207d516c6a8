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

// Line-oriented text form of a Circuit:
//
//   h q[0]
//   rx(in[2]) q[1]
//   rot(th[0],th[1],th[2]) q[3]
//   rz(0.5) q[0]
//   cx q[0],q[1]
//
// One gate per line, LF terminated. Angles are `th[i]` (trainable slot),
// `in[i]` (input slot), or a decimal constant in radians written in shortest
// round-trip form. Blank lines and lines starting with '#' are ignored.

#include <algorithm>
#include <charconv>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qmtl/circuit.hpp"
#include "qmtl/errors.hpp"

namespace qmtl {

inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string export_text(const Circuit& circuit) {
  std::string out;
  for (const auto& op : circuit.ops()) {
    out += gate_name(op.kind);
    if (op.num_params() > 0) {
      out += '(';
      for (std::size_t k = 0; k < op.num_params(); ++k) {
        if (k) out += ',';
        const auto& p = op.params[k];
        switch (p.source) {
          case ParamRef::Source::Trainable: out += "th[" + std::to_string(p.index) + "]"; break;
          case ParamRef::Source::Input: out += "in[" + std::to_string(p.index) + "]"; break;
          case ParamRef::Source::Constant: out += format_double(p.value); break;
        }
      }
      out += ')';
    }
    out += ' ';
    for (std::size_t k = 0; k < op.num_qubits(); ++k) {
      if (k) out += ',';
      out += "q[" + std::to_string(op.qubits[k]) + "]";
    }
    out += '\n';
  }
  return out;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

inline std::optional<std::size_t> parse_index(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size() + 3 || s.substr(0, prefix.size()) != prefix ||
      s[prefix.size()] != '[' || s.back() != ']') {
    return std::nullopt;
  }
  const auto digits = s.substr(prefix.size() + 1, s.size() - prefix.size() - 2);
  std::size_t value = 0;
  auto res = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (res.ec != std::errc{} || res.ptr != digits.data() + digits.size()) return std::nullopt;
  return value;
}

inline std::optional<GateKind> gate_from_name(std::string_view name) {
  for (auto k : {GateKind::H, GateKind::X, GateKind::Y, GateKind::Z, GateKind::Rx, GateKind::Ry,
                 GateKind::Rz, GateKind::Rot, GateKind::CNOT}) {
    if (gate_name(k) == name) return k;
  }
  return std::nullopt;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

}  // namespace detail

/// Parses the text form. Register width and slot counts are the smallest
/// that fit the text, raised to the given minimums.
inline Circuit parse_circuit_text(std::string_view text, std::size_t min_qubits = 1,
                                  std::size_t min_trainable = 0, std::size_t min_inputs = 0) {
  std::vector<GateOp> ops;
  std::vector<std::size_t> op_lines;
  std::size_t nq = min_qubits, nt = min_trainable, ni = min_inputs;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    const auto line = detail::trim(text.substr(pos, eol - pos));
    pos = eol + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;

    const auto space = line.find(' ');
    if (space == std::string_view::npos) throw ParseError("expected gate and qubits", line_no);
    auto head = line.substr(0, space);
    const auto qubit_part = detail::trim(line.substr(space + 1));

    std::string_view param_part;
    if (const auto paren = head.find('('); paren != std::string_view::npos) {
      if (head.back() != ')') throw ParseError("unterminated parameter list", line_no);
      param_part = head.substr(paren + 1, head.size() - paren - 2);
      head = head.substr(0, paren);
    }
    const auto kind = detail::gate_from_name(head);
    if (!kind) throw ParseError("unknown gate '" + std::string(head) + "'", line_no);

    GateOp op{*kind, {}, {}};
    const auto qubits = detail::split(qubit_part, ',');
    if (qubits.size() != op.num_qubits()) {
      throw ParseError(std::string(head) + " takes " + std::to_string(op.num_qubits()) +
                           " qubit(s)",
                       line_no);
    }
    for (std::size_t k = 0; k < qubits.size(); ++k) {
      const auto q = detail::parse_index(qubits[k], "q");
      if (!q) throw ParseError("bad qubit '" + std::string(qubits[k]) + "'", line_no);
      op.qubits[k] = *q;
      nq = std::max(nq, *q + 1);
    }

    const auto params =
        param_part.empty() ? std::vector<std::string_view>{} : detail::split(param_part, ',');
    if (params.size() != op.num_params()) {
      throw ParseError(std::string(head) + " takes " + std::to_string(op.num_params()) +
                           " parameter(s)",
                       line_no);
    }
    for (std::size_t k = 0; k < params.size(); ++k) {
      if (auto t = detail::parse_index(params[k], "th")) {
        op.params[k] = ParamRef::trainable(*t);
        nt = std::max(nt, *t + 1);
      } else if (auto in = detail::parse_index(params[k], "in")) {
        op.params[k] = ParamRef::input(*in);
        ni = std::max(ni, *in + 1);
      } else {
        double v = 0;
        auto res = std::from_chars(params[k].data(), params[k].data() + params[k].size(), v);
        if (res.ec != std::errc{} || res.ptr != params[k].data() + params[k].size()) {
          throw ParseError("bad parameter '" + std::string(params[k]) + "'", line_no);
        }
        op.params[k] = ParamRef::constant(v);
      }
    }
    ops.push_back(op);
    op_lines.push_back(line_no);
  }

  Circuit c(nq, nt, ni);
  for (std::size_t i = 0; i < ops.size(); ++i) {
    try {
      c.add(ops[i]);
    } catch (const IndexError& e) {
      throw ParseError(e.what(), op_lines[i]);
    }
  }
  return c;
}

}  // namespace qmtl
