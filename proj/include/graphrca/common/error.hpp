// Copyright 2026 The graphrca Authors. All Rights Reserved.
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
//
// Error types shared by every module. Each failure class named by the
// contracts maps to one exception type so callers can catch selectively.

#pragma once

#include <stdexcept>
#include <string>

namespace graphrca {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Syntax-level failure decoding a JSON document.
class MalformedDocument : public Error {
 public:
  using Error::Error;
};

// A structurally valid document that breaks a graph or schema invariant.
class SchemaViolation : public Error {
 public:
  using Error::Error;
};

class UnknownEntity : public Error {
 public:
  using Error::Error;
};

class UnknownBlock : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, int line, int column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " +
              message),
        message_(message),
        line_(line),
        column_(column) {}

  const std::string& message() const { return message_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  std::string message_;
  int line_;
  int column_;
};

// Program facts whose region nesting is not a consistent tree.
class InconsistentFacts : public Error {
 public:
  using Error::Error;
};

class MissingFixture : public Error {
 public:
  using Error::Error;
};

// Transport-level failure reaching the model backend.
class PolicyUnavailable : public Error {
 public:
  using Error::Error;
};

// The model kept producing unusable replies after the retry limit.
class InvalidReply : public Error {
 public:
  InvalidReply(const std::string& message, int attempts)
      : Error(message), attempts_(attempts) {}

  int attempts() const { return attempts_; }

 private:
  int attempts_;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace graphrca
