#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace csbench {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A file does not match the binary or text layout it claims to have.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// A caller violated a documented precondition (shape, range, size).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class RegistryError : public Error {
 public:
  using Error::Error;
};

/// The method exists in the registry but has no executable solver.
class UnsupportedMethodError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

/// A raw result table is missing a (dataset, ratio) cell or holds duplicates.
class CompletenessError : public Error {
 public:
  using Error::Error;
};

class LinalgError : public Error {
 public:
  using Error::Error;
};

class EmptyDatasetError : public Error {
 public:
  using Error::Error;
};

/// The clock could not resolve the measured interval (zero elapsed time).
class MeasurementResolutionError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver produced a non-finite state.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, std::size_t iteration)
      : Error(what + " (iteration " + std::to_string(iteration) + ")"), iteration_(iteration) {}

  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

}  // namespace csbench
