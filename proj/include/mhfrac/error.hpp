#pragma once

#include <stdexcept>
#include <string>

namespace mhfrac {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A parameter lies outside the documented domain (s out of range, h <= 0, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Shape parameters are degenerate or inconsistent.
class InvalidSpecError : public Error {
public:
    using Error::Error;
};

/// Grid spacing is too coarse for the smallest feature of a shape.
class FeatureTooFineError : public Error {
public:
    using Error::Error;
};

/// Operation requires a nonempty domain (occupied cells or admissible nodes).
class EmptyDomainError : public Error {
public:
    using Error::Error;
};

/// Vector or matrix sizes disagree.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// An iterative or adaptive procedure did not reach its tolerance.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// Input violates a mathematical hypothesis of the routine (e.g. w(theta0) != 0).
class HypothesisError : public Error {
public:
    using Error::Error;
};

/// Malformed file or command-line input.
class ParseError : public Error {
public:
    using Error::Error;
};

}  // namespace mhfrac
