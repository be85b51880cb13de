#pragma once

#include <stdexcept>
#include <string>

namespace bneck {

/// Base for every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// A closed form was queried outside the parameter range where it holds.
class DomainError : public InvalidParameter {
 public:
  using InvalidParameter::InvalidParameter;
};

/// An expected cost is +infinity (waiting at an empty queue while nobody
/// else ever enters).
class DivergentCost : public Error {
 public:
  using Error::Error;
};

/// A profile reaches an empty-queue state where nobody ever enters, so play
/// never ends.
class NonTerminatingProfile : public Error {
 public:
  using Error::Error;
};

/// The solver reached a state the existence argument rules out.
class InternalInconsistency : public Error {
 public:
  using Error::Error;
};

}  // namespace bneck
