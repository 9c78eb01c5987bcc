#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace monoqkd {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of an operation.
struct DomainError : Error {
  using Error::Error;
};

/// A CHSH value that the named theory cannot produce (e.g. above Tsirelson
/// under QM-monogamy). Never clamped silently.
struct OutOfTheoryRange : DomainError {
  using DomainError::DomainError;
};

struct ArityMismatch : Error {
  using Error::Error;
};

/// Base for box-table validation failures; carries the flat index of the
/// first offending entry (or the first entry of the offending setting row).
struct BoxInvariantError : Error {
  BoxInvariantError(const std::string& what, std::size_t index)
      : Error(what), index(index) {}
  std::size_t index;
};

struct NormalizationError : BoxInvariantError {
  using BoxInvariantError::BoxInvariantError;
};

struct NegativeProbability : BoxInvariantError {
  using BoxInvariantError::BoxInvariantError;
};

}  // namespace monoqkd
