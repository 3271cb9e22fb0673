// Copyright 2026 The qafs Authors
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

namespace qafs {

/// Base class for every error raised by the library. The CLI maps the
/// concrete subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed delimited input. Carries the 1-based line number in the source
/// (the header is line 1).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Invalid run parameters: missing target column, k out of range, ...
class ConfigError : public Error {
  using Error::Error;
};

/// Values that cannot be processed: non-finite numbers, length mismatch.
class DataError : public Error {
  using Error::Error;
};

/// Input that makes an operation meaningless (e.g. normalizing a zero matrix).
class DegenerateInputError : public Error {
  using Error::Error;
};

/// Requested size exceeds the dense-storage or enumeration limit.
class CapacityError : public Error {
  using Error::Error;
};

/// Operands with incompatible dimensions.
class ShapeError : public Error {
  using Error::Error;
};

/// Scalar argument outside its admissible range.
class DomainError : public Error {
  using Error::Error;
};

/// Quantum state that violates normalization.
class StateError : public Error {
  using Error::Error;
};

/// Matrix lacking a required structural property (Hermitian, diagonal).
class MatrixError : public Error {
  using Error::Error;
};

/// Spectral gap closed (level crossing); adiabatic bounds are undefined.
class DegenerateGapError : public Error {
  using Error::Error;
};

/// Loss of finiteness during time integration.
class NumericalError : public Error {
  using Error::Error;
};

}  // namespace qafs
