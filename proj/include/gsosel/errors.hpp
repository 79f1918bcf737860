#pragma once

#include <stdexcept>
#include <string>

namespace gsosel {

/// Malformed or inconsistent input data (bundle files, configs).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical routine hit a state it cannot recover from
/// (non-finite values, failed factorization).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gsosel
