#pragma once

#include <stdexcept>
#include <string>

namespace sticklab {

struct DegenerateOrientation : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct NumericalDegeneracy : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct OutOfDomain : std::domain_error {
  using std::domain_error::domain_error;
};

struct PreconditionFailed : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct WrongArity : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct Unsupported : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct OutOfRegime : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace sticklab
