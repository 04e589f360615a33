#pragma once

#include <stdexcept>
#include <string>

namespace ckis {

/// Cholesky factorization failed at the maximum jitter level.
class SingularSystemError : public std::runtime_error {
 public:
  explicit SingularSystemError(const std::string& what) : std::runtime_error(what) {}
};

/// The self-normalizing weight sum is (numerically) zero, so no estimate exists.
class DegenerateNormalizerError : public std::runtime_error {
 public:
  explicit DegenerateNormalizerError(const std::string& what) : std::runtime_error(what) {}
};

/// A drawn sample has zero proposal density while the target is positive there.
class AbsoluteContinuityError : public std::runtime_error {
 public:
  explicit AbsoluteContinuityError(const std::string& what) : std::runtime_error(what) {}
};

/// A test function or density returned a non-finite value at a drawn sample.
class NonFiniteValueError : public std::runtime_error {
 public:
  explicit NonFiniteValueError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ckis
