#pragma once

#include <stdexcept>
#include <string>

namespace sarcv {

/// Precondition violated by a caller (bad sizes, out-of-range parameters).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical routine failed (factorization, NaN in a kernel formula).
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Spectrum too degenerate for a Mahalanobis-type score.
class DegenerateSpectrum : public NumericError {
public:
    using NumericError::NumericError;
};

namespace detail {

inline void require(bool condition, const std::string& message)
{
    if (!condition) {
        throw InvalidArgument(message);
    }
}

} // namespace detail
} // namespace sarcv
