#pragma once

#include <stdexcept>
#include <string>

namespace rbev {

// Base class for all library errors. CLI maps subtypes to exit codes.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input data violates a numeric precondition (NaN/Inf, bad range).
struct InvalidInput : Error {
    using Error::Error;
};

struct NonFiniteInput : InvalidInput {
    using InvalidInput::InvalidInput;
};

struct BadAzimuthSize : InvalidInput {
    using InvalidInput::InvalidInput;
};

struct BadFraction : InvalidInput {
    using InvalidInput::InvalidInput;
};

struct WindowTooLarge : InvalidInput {
    using InvalidInput::InvalidInput;
};

struct EmptyPointCloud : InvalidInput {
    using InvalidInput::InvalidInput;
};

struct NoResults : InvalidInput {
    using InvalidInput::InvalidInput;
};

struct BadShape : InvalidInput {
    using InvalidInput::InvalidInput;
};

struct ShapeMismatch : InvalidInput {
    using InvalidInput::InvalidInput;
};

struct BadScheduleParams : InvalidInput {
    using InvalidInput::InvalidInput;
};

struct NoiseAtFinalStep : InvalidInput {
    using InvalidInput::InvalidInput;
};

struct TooSmall : InvalidInput {
    using InvalidInput::InvalidInput;
};

struct MissingForwardCache : Error {
    using Error::Error;
};

// Filesystem-level failure (missing file, short read, unwritable path).
struct IoError : Error {
    using Error::Error;
};

// File exists but its content does not match the expected format.
struct FormatError : Error {
    using Error::Error;
};

}  // namespace rbev
