#pragma once

#include <stdexcept>
#include <string>

namespace runsort {

/// Malformed argument: not a permutation, out-of-range coordinate, etc.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A family oracle that violates the family contract (e.g. rejects 1).
class InvalidFamily : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Work requested beyond a configured cap (enumeration size, exact mode).
class ResourceLimit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An operation was called without the inputs it depends on.
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Point outside the domain an analytic statement is made on.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace runsort
