#pragma once

#include <stdexcept>
#include <string>

namespace dtsfd {

// Bad user input: malformed files, out-of-range parameters, dimension
// mismatches. The CLI maps this to exit code 1.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical routine failed: non-convergence, non-finite iterates,
// singular systems. The CLI maps this to exit code 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dtsfd
