#pragma once

#include <stdexcept>
#include <string>

namespace sgcm {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid parameter value (out-of-range tolerance, bad order, ...).
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Two objects that must live on the same grid / have the same dimension do not.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Mismatched density grids.
class GridError : public Error {
public:
    using Error::Error;
};

/// Empty sample where at least one observation is required.
class EmptyInputError : public Error {
public:
    using Error::Error;
};

/// A structural invariant of an input object is violated (non-unit sphere row,
/// negative density value, non-increasing time grid, ...).
class InvariantError : public Error {
public:
    using Error::Error;
};

/// Matrix shape does not match the operation (non-square Gram, column mismatch).
class ShapeError : public Error {
public:
    using Error::Error;
};

/// All off-diagonal distances are zero, so no bandwidth can be formed.
class DegenerateDistancesError : public Error {
public:
    using Error::Error;
};

/// Gram matrix carries no usable spectrum (all eigenvalues at or below the floor).
class DegenerateGramError : public Error {
public:
    using Error::Error;
};

/// A linear system could not be solved to working accuracy.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// A cross-fitting fold ended up with fewer than two points.
class FoldSizeError : public Error {
public:
    using Error::Error;
};

/// Sample too small for the requested operation.
class SampleSizeError : public Error {
public:
    using Error::Error;
};

/// A deliberately size-guarded routine (the brute-force oracle) was called on
/// an input above its guard.
class SizeGuardError : public Error {
public:
    using Error::Error;
};

/// File missing, unreadable, or unparseable; messages name the file and row.
class FileError : public Error {
public:
    using Error::Error;
};

}  // namespace sgcm
