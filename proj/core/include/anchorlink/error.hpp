#pragma once

#include <stdexcept>
#include <string>

namespace anchorlink {

/// Malformed or inconsistent input data (files, ids, shapes, invariant
/// violations). CLI maps this to exit code 2.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bad configuration supplied by the caller (unknown preset, invalid
/// ratio, ...). CLI maps this to exit code 1.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Non-finite value produced where finiteness is required.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace anchorlink
