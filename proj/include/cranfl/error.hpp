// Copyright 2026 The cranfl Authors. All Rights Reserved.
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
// =============================================================================

#ifndef CRANFL_ERROR_HPP
#define CRANFL_ERROR_HPP

#include <stdexcept>
#include <string>

namespace cranfl {

/// Malformed input: empty vectors, mismatched dimensions, bad configuration.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An allocation violates a power/fronthaul budget or yields zero rate.
class Infeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The required number of rounds for the accuracy target is not positive.
class AccuracyUnreachable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite intermediate value inside a solver.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A training run produced a non-finite loss or weight.
class Diverged : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Configuration file does not match the documented schema.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cranfl

#endif  // CRANFL_ERROR_HPP
