#pragma once

#include <stdexcept>
#include <string>

namespace fairloc {

// Malformed input: bad indices, inconsistent budgets, invalid parameters.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A solver could not produce an answer (infeasible LP, pivot cap, singular
// basis) or a checked postcondition fired.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fairloc
