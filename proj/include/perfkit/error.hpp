#pragma once

#include <stdexcept>
#include <string>

namespace perfkit {

// Raised for invalid input data (malformed notes, inconsistent shapes,
// unsatisfiable preconditions). The CLI maps it to exit code 2.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace perfkit
