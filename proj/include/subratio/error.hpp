#pragma once

#include <stdexcept>
#include <string>

namespace subratio {

enum class ErrorKind {
  config,        // invalid scenario / parameters
  input_format,  // malformed trace or config file
  no_window,     // not enough motion-free data to form a window
  numeric,       // singular or undefined computation (pole, zero variance, ...)
};

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

class InputFormatError : public Error {
 public:
  explicit InputFormatError(const std::string& what) : Error(ErrorKind::input_format, what) {}
};

class NoWindowError : public Error {
 public:
  explicit NoWindowError(const std::string& what) : Error(ErrorKind::no_window, what) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error(ErrorKind::numeric, what) {}
};

/// Process exit code for the CLI: 2 config, 3 input format, 4 no window.
inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::config: return 2;
    case ErrorKind::input_format: return 3;
    case ErrorKind::no_window: return 4;
    case ErrorKind::numeric: return 1;
  }
  return 1;
}

}  // namespace subratio
