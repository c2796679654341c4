#pragma once

#include <stdexcept>
#include <string>

namespace courttrack {

// Domain errors: the inputs were readable but the data is unusable.
// The CLI maps these to exit code 1.
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InsufficientPoints : DomainError {
    using DomainError::DomainError;
};
struct DegenerateConfiguration : DomainError {
    using DomainError::DomainError;
};
struct PointAtInfinity : DomainError {
    using DomainError::DomainError;
};
struct SingularMatrix : DomainError {
    using DomainError::DomainError;
};
struct EmptyTrack : DomainError {
    using DomainError::DomainError;
};
struct AllFramesOutliers : DomainError {
    using DomainError::DomainError;
};
struct UnfillableGap : DomainError {
    using DomainError::DomainError;
};
struct NoOverlap : DomainError {
    using DomainError::DomainError;
};
struct InvalidPose : DomainError {
    using DomainError::DomainError;
};
struct InvalidConfig : DomainError {
    using DomainError::DomainError;
};

// Input errors: the file could not be opened or parsed.
// The CLI maps these to exit code 2.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FileError : InputError {
    using InputError::InputError;
};
struct ParseError : InputError {
    ParseError(const std::string& what, long line)
        : InputError(what + " (line " + std::to_string(line) + ")"), line_number(line) {}
    explicit ParseError(const std::string& what) : InputError(what), line_number(-1) {}
    long line_number;
};
struct DuplicateFrame : InputError {
    using InputError::InputError;
};
struct NonMonotonicFrameIds : InputError {
    using InputError::InputError;
};

}  // namespace courttrack
