#pragma once

#include <stdexcept>
#include <string>

namespace procbench {

// Failure categories map onto the CLI exit codes: config 1, data 2, everything else 3.
enum class ErrorKind { config, data, input, internal, arithmetic };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::data, what) {}
};

// A malformed input row; carries the 1-based line number of the offending row.
class RowError : public DataError {
 public:
  RowError(std::size_t line, const std::string& what)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Raised when a (log, window) combination produces no samples at all.
class EmptyDatasetError : public DataError {
 public:
  explicit EmptyDatasetError(const std::string& what) : DataError(what) {}
};

class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error(ErrorKind::input, what) {}
};

class InternalError : public Error {
 public:
  explicit InternalError(const std::string& what) : Error(ErrorKind::internal, what) {}
};

class ArithmeticError : public Error {
 public:
  explicit ArithmeticError(const std::string& what) : Error(ErrorKind::arithmetic, what) {}
};

}  // namespace procbench
