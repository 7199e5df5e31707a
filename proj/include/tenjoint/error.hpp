// Copyright 2026 The tenjoint Authors.
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

namespace tenjoint {

// Base for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Builder-operation rejections: duplicate names, degenerate rods, dangling
// anchors, bad limits, name collisions on compose.
class StructureError : public Error {
 public:
  using Error::Error;
};

// .tsg / CSV errors. `line()` is 1-based, 0 when not line-bound.
// `rejected()` marks a well-formed declaration that a builder refused
// (dangling anchor, bad limits) as opposed to a syntax error.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, bool rejected = false)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line),
        rejected_(rejected) {}
  int line() const { return line_; }
  bool rejected() const { return rejected_; }

 private:
  int line_;
  bool rejected_;
};

// Non-finite simulation state or a degenerate cable direction.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, std::string culprit)
      : Error(what + " (" + culprit + ")"), culprit_(std::move(culprit)) {}
  const std::string& culprit() const { return culprit_; }

 private:
  std::string culprit_;
};

// Motor-command misuse: filtering a passive cable, driving an unpaired cable.
class ActuationError : public Error {
 public:
  using Error::Error;
};

// Policy construction or evaluation failures.
class PolicyError : public Error {
 public:
  using Error::Error;
};

// Rejected physical parameters (elbow generator, configs).
class ParameterError : public Error {
 public:
  using Error::Error;
};

}  // namespace tenjoint
