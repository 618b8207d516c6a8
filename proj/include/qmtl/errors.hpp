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

#include <stdexcept>
#include <string>

namespace qmtl {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Requested register exceeds the simulator's memory guard.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// A qubit, parameter, or label index lies outside its valid range.
class IndexError : public Error {
 public:
  using Error::Error;
};

/// Vector lengths or matrix shapes disagree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Observables in a measurement group do not qubit-wise commute.
class GroupingError : public Error {
 public:
  using Error::Error;
};

/// Invalid model, head, training, or dataset configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed structured text (circuit text, config, checkpoint).
class ParseError : public ConfigError {
 public:
  ParseError(const std::string& what, std::size_t line)
      : ConfigError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A trainable slot is bound to a gate the shift rule cannot differentiate.
class UnsupportedGateError : public Error {
 public:
  using Error::Error;
};

/// A reduction has no contributing terms (all labels missing, empty set).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// Optimisation produced NaN or infinite values.
class NonFiniteError : public Error {
 public:
  using Error::Error;
};

}  // namespace qmtl
