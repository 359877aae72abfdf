#pragma once
#include <stdexcept>
#include <string>

namespace susylab {

// Bad user input: malformed config, out-of-range parameters.
struct InvalidInput : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// The operation is well defined but deliberately refused (e.g. N < n for
// the Wishart route, a covariance that fails validation).
struct Refusal : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Algebraic misuse: mixing generator sets, wrong parity, singular body.
struct AlgebraError : std::logic_error {
  using std::logic_error::logic_error;
};

struct NumericalFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace susylab
