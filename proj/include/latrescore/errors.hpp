// latrescore/errors.hpp

// Copyright 2026  The latrescore Authors

// See ../../LICENSE for clarification regarding multiple authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace latrescore {

// All library failures derive from Error.  Validation failures (bad input,
// bad configuration) and scorer failures are kept apart so that tools can
// map them to distinct exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class ParseError : public ValidationError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : ValidationError(line == 0 ? what
                                  : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  // 1-based line number within the parsed document, 0 when not applicable.
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class CycleError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class NondeterminismError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class TooManyPathsError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ConfigError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class UncoveredArcError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class MissingReferenceError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ScorerError : public Error {
 public:
  using Error::Error;
};

// Malformed response, id mismatch or wrong token count.
class ScorerProtocolError : public ScorerError {
 public:
  using ScorerError::ScorerError;
};

class ScorerUnavailableError : public ScorerError {
 public:
  using ScorerError::ScorerError;
};

}  // namespace latrescore
