#pragma once

#include <stdexcept>
#include <string>

namespace icasim {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Shape or size of an input does not match the operation's requirements.
class DimensionError : public Error {
public:
    explicit DimensionError(const std::string& msg) : Error(msg) {}
};

/// Data is numerically rank-deficient where full rank is required.
class SingularDataError : public Error {
public:
    SingularDataError(const std::string& msg, int deficient_dims)
        : Error(msg), deficient(deficient_dims) {}
    int deficient;  ///< number of dimensions below the eigenvalue floor
};

/// A documented precondition was violated by the caller.
class ContractViolationError : public Error {
public:
    explicit ContractViolationError(const std::string& msg) : Error(msg) {}
};

/// Source separation produced zero converged components.
class SeparationFailedError : public Error {
public:
    SeparationFailedError(const std::string& msg, int attempted, int converged_count)
        : Error(msg), components_attempted(attempted), components_converged(converged_count) {}
    int components_attempted;
    int components_converged;
};

/// Spreading-code construction or lookup failure.
class CodeError : public Error {
public:
    explicit CodeError(const std::string& msg) : Error(msg) {}
};

/// Experiment configuration is syntactically or semantically invalid.
class ConfigError : public Error {
public:
    ConfigError(const std::string& msg, int line_number = 0)
        : Error(msg), line(line_number) {}
    int line;  ///< 1-based line in the config file, 0 if not tied to a line
};

/// Filesystem failure, message carries the offending path.
class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error(msg) {}
};

}  // namespace icasim
