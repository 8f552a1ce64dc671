#pragma once

#include <stdexcept>
#include <string>

namespace gtlab {

/// An argument outside its documented domain.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Data that cannot have come from the noiseless model, or files whose
/// dimensions disagree.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The exhaustive oracle was asked to enumerate more candidates than it allows.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The simplex solver gave up (iteration cap).
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gtlab
