#pragma once

#include <stdexcept>
#include <string>

namespace secord {

// Root of every error raised by the library. Each subclass maps onto one
// failure category that callers (notably the CLI) dispatch on.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

class ProtectedIndex : public Error {
 public:
  using Error::Error;
};

class IndexOutOfRange : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  explicit ParseError(const std::string& what) : Error(what) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_ = 0;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class UndefinedMetric : public Error {
 public:
  using Error::Error;
};

// Network failure or timeout; raised after the retry budget is spent.
class TransportError : public Error {
 public:
  using Error::Error;
};

class ProtocolError : public Error {
 public:
  using Error::Error;
};

class RemoteModelError : public Error {
 public:
  RemoteModelError(int status, const std::string& message)
      : Error("remote model error (HTTP " + std::to_string(status) + "): " + message),
        status_(status) {}

  int status() const { return status_; }

 private:
  int status_;
};

}  // namespace secord
