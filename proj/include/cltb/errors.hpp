#pragma once

#include <stdexcept>

namespace cltb {

// Raised when a numeric engine cannot deliver its contract (support
// explosion in exact convolution, non-finite search objective, ...).
struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised for malformed configuration or serialization input.
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace cltb
