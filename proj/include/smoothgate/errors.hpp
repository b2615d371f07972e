// Copyright 2026 The smoothgate Authors
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

namespace smoothgate {

// Invalid model parameters (violated invariants).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Argument outside the domain of a function, e.g. a time past the ramp end.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Numerical failure: non-convergence, insufficient resolution, NaN output.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GridResolutionError : public NumericError {
 public:
  using NumericError::NumericError;
};

class ConvergenceError : public NumericError {
 public:
  using NumericError::NumericError;
};

class TruncationError : public NumericError {
 public:
  using NumericError::NumericError;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace smoothgate
