#pragma once

#include <stdexcept>
#include <string>

namespace halfgl {

/// Precondition or invariant violated by caller-supplied data.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed (divergence, non-convergence, non-finite values).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define HALFGL_REQUIRE(cond, msg)                                   \
    do {                                                            \
        if (!(cond)) throw ::halfgl::InvalidArgument(std::string(msg)); \
    } while (0)

}  // namespace halfgl
