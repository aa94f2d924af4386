#pragma once

#include <stdexcept>
#include <string>

namespace opnum {

/// Base of every error thrown by the library.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument violates an operation's precondition.
class precondition_error : public error {
public:
    using error::error;
};

/// Two ring elements with different parameters d were combined.
class parameter_mismatch_error : public error {
public:
    using error::error;
};

/// Factoring gave up: a composite cofactor survived the trial-division bound.
class resource_limit_error : public error {
public:
    using error::error;
};

/// Two independent computations of the same quantity disagree.
/// Raised only if a proven identity appears to fail; treat as a theorem violation.
class consistency_error : public error {
public:
    using error::error;
};

/// Checkpoint file missing fields, unparsable, or written for another config.
class checkpoint_error : public error {
public:
    using error::error;
};

}  // namespace opnum
