#pragma once

#include <stdexcept>
#include <string>

namespace c1mixed {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent mesh input.
class MeshError : public Error {
public:
    using Error::Error;
};

/// Singular or degenerate geometry (zero Jacobian, zero-length edge, ...).
class GeometryError : public Error {
public:
    using Error::Error;
};

/// A linear system that should be uniquely solvable was not.
class SolveError : public Error {
public:
    using Error::Error;
};

} // namespace c1mixed
