#pragma once

#include <stdexcept>
#include <string>

namespace ringres {

/// Raised when a NaN or Inf appears in features, losses, or parameters.
class numerical_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when a model file is truncated, corrupt, or of an unknown version.
class format_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace ringres
