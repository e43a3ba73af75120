#pragma once

#include <stdexcept>
#include <string>

namespace qsr {

// Base class for everything thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Operand dimensions do not match.
class DimensionError : public Error {
public:
    using Error::Error;
};

// A SpaceLayout is inconsistent with the object it is applied to.
class LayoutError : public Error {
public:
    using Error::Error;
};

// A stated operation contract was violated (non-unitary coupling,
// non-symmetric observable, invalid mixture weights, ...).
class PreconditionError : public Error {
public:
    using Error::Error;
};

// The (anti)symmetrization projector maps the state to (numerically) zero.
class AnnihilatedError : public Error {
public:
    using Error::Error;
};

// A state could not be decomposed against the supplied sector projectors.
class DecompositionError : public Error {
public:
    DecompositionError(const std::string& what, double residual_norm)
        : Error(what), residual(residual_norm) {}
    double residual;
};

// An iterative numerical routine failed to converge or broke down.
class NumericalError : public Error {
public:
    using Error::Error;
};

// Config file problems; carries the location of the offense.
class ConfigError : public Error {
public:
    ConfigError(const std::string& what, int line_no = 0, int column_no = 0)
        : Error(what), line(line_no), column(column_no) {}
    int line;
    int column;
};

}  // namespace qsr
