#pragma once

#include <stdexcept>
#include <string>

namespace qkdnet {

enum class ErrorKind {
  Input,       // malformed or inconsistent caller input
  Infeasible,  // well-formed request with no solution
  Limit,       // a configured size limit was exceeded
  Io,          // a file could not be read or written
  Internal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error(ErrorKind::Input, what) {}
};

class LimitError : public Error {
 public:
  explicit LimitError(const std::string& what) : Error(ErrorKind::Limit, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

/// Raised when a request cannot be satisfied. `best()` carries the best value
/// that was achievable (a path count, a trust value, ...), when meaningful.
class InfeasibleError : public Error {
 public:
  InfeasibleError(const std::string& what, double best)
      : Error(ErrorKind::Infeasible, what), best_(best) {}

  double best() const noexcept { return best_; }

 private:
  double best_;
};

}  // namespace qkdnet
