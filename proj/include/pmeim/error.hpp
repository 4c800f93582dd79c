// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pmeim {

// Error categories map onto the CLI exit codes: usage 1, numerical 2, I/O 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Raised by the coefficient-expression parser; offset is the byte position in the source.
class ParseError : public UsageError {
 public:
  ParseError(const std::string &what, std::size_t offset)
      : UsageError(what + " at byte " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace pmeim
