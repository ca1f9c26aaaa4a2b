#ifndef ADTNC_ERRORS_HPP
#define ADTNC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace adtnc {

// Base class for all library errors. The CLI maps subclasses to exit codes.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Caller violated a documented precondition (bad arguments, mismatched fields, ...).
struct UsageError : Error {
    using Error::Error;
};

struct ParseError : Error {
    using Error::Error;
};

struct SingularMatrixError : Error {
    using Error::Error;
};

struct CyclicNetworkError : Error {
    using Error::Error;
};

// An exact algorithm would exceed its configured enumeration budget.
struct ComplexityRefusalError : Error {
    using Error::Error;
};

struct InfeasibleConnectionError : Error {
    using Error::Error;
};

struct InfeasibleUnderFailureError : Error {
    InfeasibleUnderFailureError(const std::string& msg, std::string pattern)
        : Error(msg), failing_pattern(std::move(pattern)) {}
    std::string failing_pattern;
};

struct RandomizationExhaustedError : Error {
    using Error::Error;
};

struct NotSupportedError : Error {
    using Error::Error;
};

}  // namespace adtnc

#endif
