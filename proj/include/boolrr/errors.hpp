#pragma once

#include <stdexcept>

namespace boolrr {

// A checked mathematical invariant failed at runtime (CLI exit code 2).
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An operation was asked for something its inputs make undefined (e.g. conditioning on f = 0).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace boolrr
