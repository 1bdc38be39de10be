/*
   Copyright 2026 The incidx Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace incidx {

enum class ErrorKind : std::uint8_t {
  kInvariantViolation,
  kCorruptSegment,
  kCapacity,
  kInputFormat,
  kInputOrder,
  kState,
  kIo,
  kFileFormat,
  kUsage,
};

const char* to_string(ErrorKind kind);

// Base for every error the library throws. The kind drives CLI exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class InvariantViolation : public Error {
 public:
  explicit InvariantViolation(const std::string& what)
      : Error(ErrorKind::kInvariantViolation, what) {}
};

class CorruptSegment : public Error {
 public:
  explicit CorruptSegment(const std::string& what)
      : Error(ErrorKind::kCorruptSegment, what) {}
};

class CapacityError : public Error {
 public:
  explicit CapacityError(const std::string& what)
      : Error(ErrorKind::kCapacity, what) {}
};

// Malformed corpus or query input. line is 1-based, 0 when unknown.
class InputFormatError : public Error {
 public:
  InputFormatError(const std::string& what, std::uint64_t line = 0)
      : Error(ErrorKind::kInputFormat,
              line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::uint64_t line() const noexcept { return line_; }

 private:
  std::uint64_t line_;
};

class InputOrderError : public Error {
 public:
  explicit InputOrderError(const std::string& what)
      : Error(ErrorKind::kInputOrder, what) {}
};

class StateError : public Error {
 public:
  explicit StateError(const std::string& what) : Error(ErrorKind::kState, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::kIo, what) {}
};

// Persisted index file is truncated, has a bad magic, or an unknown version.
class FileFormatError : public Error {
 public:
  explicit FileFormatError(const std::string& what)
      : Error(ErrorKind::kFileFormat, what) {}
};

}  // namespace incidx
