#ifndef FIDESR_ERROR_HPP
#define FIDESR_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fidesr {

// Error categories map onto the CLI exit codes: everything except
// DivergenceError is a usage/format/IO problem (exit 2), divergence is 3.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ShapeError : Error {
    using Error::Error;
};

struct ParamError : Error {
    using Error::Error;
};

struct FormatError : Error {
    using Error::Error;
};

struct UnsupportedVersionError : FormatError {
    using FormatError::FormatError;
};

struct IoError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct DivergenceError : Error {
    DivergenceError(std::size_t step, const std::string& what)
        : Error(what), step(step) {}
    std::size_t step;
};

}  // namespace fidesr

#endif
