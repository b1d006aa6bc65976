#ifndef STOPLINE_ERRORS_HPP
#define STOPLINE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace stopline {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Input outside the state space / grid domain.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Invalid parameter values (non-finite, wrong sign, ...).
class ParameterError : public Error {
public:
    using Error::Error;
};

/// A sign assumption on the generator does not hold for this model/utility.
class AssumptionViolation : public Error {
public:
    using Error::Error;
};

/// A residual never changed sign over the scanned candidate range.
/// The message carries the sampled candidates/residuals for diagnosis.
class NoBracketError : public Error {
public:
    using Error::Error;
};

/// Solver produced boundaries incompatible with the stopping-set shape.
class InvalidShapeError : public Error {
public:
    using Error::Error;
};

/// Linear-algebra breakdown (singular tridiagonal pivot, non-finite values).
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Config file parse/validation failure; message names line and key.
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace stopline

#endif
