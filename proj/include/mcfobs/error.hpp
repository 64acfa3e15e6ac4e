#pragma once

#include <stdexcept>
#include <string>

namespace mcfobs {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Inputs live on different grids.
class GridMismatch : public Error {
public:
    GridMismatch() : Error("grid mismatch") {}
    explicit GridMismatch(const std::string& what) : Error("grid mismatch: " + what) {}
};

/// A precondition on an argument does not hold (NaN input, bad parameter...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Every sample equals the contour level, so no level line can be chosen.
class AmbiguousContour : public Error {
public:
    AmbiguousContour() : Error("ambiguous contour: field is identically equal to the level") {}
};

/// Distance between contours requested with an empty operand.
class UndefinedDistance : public Error {
public:
    UndefinedDistance() : Error("distance undefined: empty contour") {}
};

/// The zero level set disappeared (no sign change anywhere).
class VanishedSet : public Error {
public:
    VanishedSet() : Error("vanished set: field has no sign change") {}
};

/// Primal iterate violates the obstacle.
class Infeasible : public Error {
public:
    using Error::Error;
};

}  // namespace mcfobs
