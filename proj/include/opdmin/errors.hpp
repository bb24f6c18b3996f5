#pragma once

#include <stdexcept>
#include <string>

namespace opdmin {

// Base class for numerical failures. CLI maps these to exit code 3.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotPositiveDefinite : NumericError {
    explicit NotPositiveDefinite(const std::string& what) : NumericError(what) {}
};

struct ConvergenceFailure : NumericError {
    explicit ConvergenceFailure(const std::string& what) : NumericError(what) {}
};

struct NotUnitVector : NumericError {
    explicit NotUnitVector(const std::string& what) : NumericError(what) {}
};

struct DimensionMismatch : NumericError {
    explicit DimensionMismatch(const std::string& what) : NumericError(what) {}
};

struct MeanNotCentered : NumericError {
    explicit MeanNotCentered(const std::string& what) : NumericError(what) {}
};

// Input and configuration failures. CLI maps these to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : ConfigError {
    ParseError(const std::string& what, long line)
        : ConfigError(what + " (line " + std::to_string(line) + ")"), line_number(line) {}
    long line_number;
};

struct EmptyGraph : ConfigError {
    explicit EmptyGraph(const std::string& what) : ConfigError(what) {}
};

}  // namespace opdmin
