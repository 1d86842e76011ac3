// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace pass {

// Input that violates a type invariant. The CLI maps this family to exit status 1.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A coupler cannot extract the requested fraction (target above max efficiency F).
class UnreachableFractionError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// An equally spaced aperture does not fit on the waveguide.
class TruncationError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// User located exactly on a pinching antenna (r = 0).
class SingularityError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

} // namespace pass
