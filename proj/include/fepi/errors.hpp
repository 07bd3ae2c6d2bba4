#pragma once

#include <stdexcept>
#include <string>

namespace fepi {

/// Malformed or inconsistent input data (bad CSV, missing outcome, join
/// failure). Maps to CLI exit code 3.
struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical failure (optimizer breakdown, degenerate variance). Maps to
/// CLI exit code 4.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace fepi
