#pragma once

#include <stdexcept>

namespace pnft {

// Error taxonomy mirrored by the CLI exit codes: input 2, numerical 3,
// validation 4.
struct input_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct validation_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace pnft
