#pragma once

#include <stdexcept>
#include <string>

namespace expcp {

// Invalid user-supplied data or parameters.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A critical value was requested that no table or simulation can provide.
class MissingTableError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed or incompatible table file.
class FormatError : public InputError {
public:
    using InputError::InputError;
};

}  // namespace expcp
