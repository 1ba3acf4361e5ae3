// Copyright 2026 The nasp Authors.
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

namespace nasp {

class NaspError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Spec dimensions inconsistent (matrix size, lower-triangular entry, ...).
class MalformedSpecError : public NaspError {
 public:
  using NaspError::NaspError;
};
class InvalidSpecError : public NaspError {
 public:
  using NaspError::NaspError;
};
class NoPathError : public NaspError {
 public:
  using NaspError::NaspError;
};
// A rejection-sampling loop ran out of attempts.
class ExhaustedError : public NaspError {
 public:
  using NaspError::NaspError;
};
class TooLargeError : public NaspError {
 public:
  using NaspError::NaspError;
};

class ParseError : public NaspError {
 public:
  ParseError(std::size_t line, const std::string& reason)
      : NaspError("line " + std::to_string(line) + ": " + reason), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class DuplicateHashError : public NaspError {
 public:
  using NaspError::NaspError;
};
class UnknownArchitectureError : public NaspError {
 public:
  using NaspError::NaspError;
};
class ShapeError : public NaspError {
 public:
  using NaspError::NaspError;
};
class DegenerateDataError : public NaspError {
 public:
  using NaspError::NaspError;
};
class ConfigError : public NaspError {
 public:
  using NaspError::NaspError;
};

}  // namespace nasp
