#pragma once

#include <stdexcept>
#include <string>

namespace shpgr {

// Evaluation outside the admissible region of a coordinate chart.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Singular metric, Jacobian or linear system.
class DegeneracyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller broke a precondition (wrong variance, open loop, bad shape, ...).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A value that must satisfy a physical constraint does not (e.g. N not timelike).
class InvariantError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace shpgr
