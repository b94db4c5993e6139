#pragma once

#include <stdexcept>
#include <string>

namespace spinchain {

// Raised when a numerical self-check fails: a parity component that should
// vanish exceeds its tolerance, a propagated state loses unitarity, a
// quadrature fails to converge. These indicate an implementation or
// configuration bug, not bad user input, and map to their own CLI exit code.
class numerical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace spinchain
