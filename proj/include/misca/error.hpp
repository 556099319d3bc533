// Copyright 2026 The misca Authors
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

namespace misca {

/// Malformed or inconsistent input: length mismatch, out-of-range parameter,
/// infeasible generator request.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The instance is larger than what an exact method is allowed to handle.
class LimitExceeded : public std::runtime_error {
 public:
  LimitExceeded(const std::string& what, int limit)
      : std::runtime_error(what), limit_(limit) {}
  int limit() const noexcept { return limit_; }

 private:
  int limit_;
};

/// Text input (graph file, campaign spec) could not be parsed. `line` is
/// 1-based, 0 when unknown.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Singular solve, trace drift, integrator failure.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace misca
