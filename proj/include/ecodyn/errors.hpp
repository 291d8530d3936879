#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ecodyn {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Vector or matrix sizes disagree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A state lies outside the open region where a model, coordinate change or
/// Hamiltonian is defined. `coordinate` is the zero-based index of the first
/// offending component.
class DomainError : public Error {
 public:
  DomainError(const std::string& what, std::size_t coordinate)
      : Error(what), coordinate_(coordinate) {}

  std::size_t coordinate() const noexcept { return coordinate_; }

 private:
  std::size_t coordinate_;
};

/// Parameters violate a model invariant or an algebraic compatibility
/// condition. `defect` carries the size of the violation when meaningful.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what, double defect = 0.0)
      : Error(what), defect_(defect) {}

  double defect() const noexcept { return defect_; }

 private:
  double defect_;
};

/// A linear system or formula hits a singular configuration.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// Step size fell below the configured minimum or the state blew up.
class IntegrationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace ecodyn
