#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace garchre {

enum class ErrorKind {
  invalid_argument,
  io,
  parse,
  validation,
  insufficient_data,
  domain,
  numerical,
  adaptation,
};

/// Base exception for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Non-finite value encountered while evaluating a series; `index` is the
/// zero-based position of the offending observation.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, std::size_t index)
      : Error(ErrorKind::numerical, what), index_(index) {}

  [[nodiscard]] std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

}  // namespace garchre
