#pragma once

#include <stdexcept>
#include <string>

namespace orbitpe {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument is outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Hyperbolic, parabolic, or rectilinear state where a bound orbit is required.
class UnsupportedOrbitError : public Error {
public:
    using Error::Error;
};

/// Zero angular momentum: the RSW triad cannot be built.
class DegenerateFrameError : public Error {
public:
    using Error::Error;
};

/// Rejection sampling could not satisfy the scenario constraints.
class GenerationFailure : public Error {
public:
    using Error::Error;
};

/// step() called on an episode that already terminated.
class EpisodeFinishedError : public Error {
public:
    using Error::Error;
};

/// Malformed input file or payload.
class FormatError : public Error {
public:
    using Error::Error;
};

/// File system failure; the message carries the path.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace orbitpe
