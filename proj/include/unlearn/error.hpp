/*
 * Copyright 2026 The Unlearn Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef UNLEARN_ERROR_HPP_
#define UNLEARN_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace unlearn {

// Caller passed something outside an operation's preconditions.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Operation is not valid in the object's current state (e.g. predicting with
// a model whose training set has been fully deleted).
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input file is missing a required column or is otherwise shaped wrong.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed binary container. `offset` is the byte position where decoding
// failed.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " (at byte offset " +
                           std::to_string(offset) + ")"),
        offset_(offset) {}

  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// Text input (CSV, result log) could not be parsed. Line numbers are 1-based.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace unlearn

#endif  // UNLEARN_ERROR_HPP_
