// Copyright 2026 The specne Authors.
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

namespace specne {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid game instance (names the violated invariant).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Argument outside a function's domain (penalty/price maps, kernel).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Kernel inversion requested outside the kernel's range.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Intermediate quantity left a valid domain during a computation.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Problem too large for an exhaustive method.
class SizeError : public Error {
 public:
  using Error::Error;
};

class ScheduleError : public Error {
 public:
  using Error::Error;
};

/// Penalty model does not have the structure a construction needs.
class ModelError : public Error {
 public:
  using Error::Error;
};

/// Instance does not match the parameter pattern a construction needs.
class PatternError : public Error {
 public:
  using Error::Error;
};

/// Constructed support endpoints violate the required ordering.
class OrderError : public Error {
 public:
  using Error::Error;
};

/// Quantity undefined for a degenerate instance.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

}  // namespace specne
