#pragma once

#include <stdexcept>
#include <string>

namespace logdef {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised when a stored artifact fails integrity verification.
struct ChecksumError : Error {
    using Error::Error;
};

// Raised on tensor/embedding dimension disagreements.
struct ShapeError : Error {
    using Error::Error;
};

// Raised when a prompt does not fit the backbone's token budget.
struct TokenBudgetError : Error {
    using Error::Error;
};

} // namespace logdef
