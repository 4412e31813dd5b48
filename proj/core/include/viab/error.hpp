#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace viab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed expression source. `offset` is the byte offset of the
/// offending token (the input length for premature end of input).
class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class UnknownVariableError : public Error {
 public:
  explicit UnknownVariableError(std::string name)
      : Error("unknown variable '" + name + "'"), name_(std::move(name)) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

/// Division by zero, 0^negative, missing binding or non-finite result.
class EvalError : public Error {
 public:
  using Error::Error;
};

/// A model that fails validation, or a model file that cannot be read.
class ModelError : public Error {
 public:
  using Error::Error;
};

/// Bad argument to a solver or query (stage out of range, beta outside (0,1],
/// inadmissible control, enumeration guard exceeded).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace viab
