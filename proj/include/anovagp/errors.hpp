#pragma once

#include <stdexcept>

namespace anovagp {

// Invalid parameters or unsupported option combinations. CLI exit code 1.
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Malformed or mutually inconsistent input data. CLI exit code 2.
class DataError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// A numerical procedure could not complete (factorization failure,
// degenerate moments). CLI exit code 3.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace anovagp
