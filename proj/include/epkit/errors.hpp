#pragma once

#include <stdexcept>
#include <string>

namespace epkit {

// Input outside an operation's mathematical domain (CLI exit code 3).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Biorthogonal basis requested for a spectrum with a coalescing cluster.
class DegenerateBasisError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Iterative method hit its iteration cap (CLI exit code 4).
class NonConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace epkit
