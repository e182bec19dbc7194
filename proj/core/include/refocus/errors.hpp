#pragma once

#include <stdexcept>
#include <string>

namespace refocus {

// Invalid parameters or preconditions (maps to CLI exit code 1).
struct validation_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Numerical failure during an otherwise valid computation (maps to CLI exit code 2).
struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}
