#pragma once

#include <stdexcept>
#include <string>

namespace stratlab {

/// Parameters fall outside the regime where the decay estimates hold
/// (beta <= 1/2, or the viscosity/diffusivity ratio is too large).
class ParameterGateError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The requested operation is singular for this wavenumber
/// (k = 0 for the symmetric variables, l = 0 for the streak kernels).
class DegenerateModeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class StepSizeUnderflow : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InsufficientSamplingError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class SymmetryViolationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class QuadratureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
public:
    ParseError(int line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

class ValidationError : public std::invalid_argument {
public:
    ValidationError(std::string field, const std::string& what)
        : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

} // namespace stratlab
