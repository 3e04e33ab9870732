#pragma once
#include <stdexcept>
#include <string>
#include <vector>

namespace carnot {

// Error taxonomy. Everything derives from Error so callers can catch the
// whole family; the CLI maps these onto process exit codes.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Lie-algebra data failed a structural invariant (antisymmetry, grading,
// Jacobi, layer bookkeeping). `indices` identifies the offending bracket
// triple (i,j,k) or Jacobi quadruple (i,j,k,l), 1-based.
struct ValidationError : Error {
    std::vector<int> indices;
    ValidationError(const std::string& msg, std::vector<int> idx = {})
        : Error(msg), indices(std::move(idx)) {}
};

struct StepUnsupported : Error {
    using Error::Error;
};

struct NonPositiveRadius : Error {
    using Error::Error;
};

struct GridMismatch : Error {
    using Error::Error;
};

struct GridTooSmall : Error {
    using Error::Error;
};

struct QuadratureNotConverged : Error {
    using Error::Error;
};

struct UnknownDatum : Error {
    using Error::Error;
};

struct InvalidNormPair : Error {
    using Error::Error;
};

struct DegenerateFit : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

} // namespace carnot
