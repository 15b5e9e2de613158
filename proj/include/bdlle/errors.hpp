#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bdlle {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on user-supplied data or parameters was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// No point satisfies the neighbor criterion for `index()`.
class EmptyNeighborhood : public Error {
 public:
  explicit EmptyNeighborhood(std::size_t index)
      : Error("empty neighborhood at point " + std::to_string(index)), index_(index) {}

  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// Barycentric weights cannot be normalized because y^T 1 vanishes.
class DegenerateNormalization : public Error {
 public:
  using Error::Error;
};

/// A factorization or eigensolve that should succeed did not.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace bdlle
