#pragma once

#include <stdexcept>

namespace drlnav {

// Raised when a loss or gradient stops being finite; training runs abort on it.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised by file loaders (maps, scenarios, configs, checkpoints) on malformed input.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace drlnav
