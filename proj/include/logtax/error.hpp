#pragma once

#include <stdexcept>
#include <string>

namespace logtax {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input: an empty corpus, an out-of-range threshold, a contradictory
/// synthetic spec and so on.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// An internal invariant was broken (e.g. a record whose token count does
/// not match the template it was assigned to).
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace logtax
