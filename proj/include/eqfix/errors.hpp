#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace eqfix {

// Process exit codes used by the CLI, one per error class.
enum class ExitCode : int {
    Success = 0,
    Usage = 1,
    Parse = 2,
    Validation = 3,
    Numerical = 4,
    NoConvergence = 5,
};

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual ExitCode exit_code() const noexcept = 0;
};

/// Malformed input: bad JSON, a missing or mistyped field.
class ParseError : public Error {
public:
    ParseError(std::string field, const std::string& message, std::optional<std::size_t> line = {})
        : Error(format(field, message, line)), field_(std::move(field)), line_(line) {}

    ExitCode exit_code() const noexcept override { return ExitCode::Parse; }
    const std::string& field() const noexcept { return field_; }
    std::optional<std::size_t> line() const noexcept { return line_; }

private:
    static std::string format(const std::string& field, const std::string& message,
                              std::optional<std::size_t> line) {
        std::string out = "parse error";
        if (line) out += " at line " + std::to_string(*line);
        if (!field.empty()) out += " in '" + field + "'";
        return out + ": " + message;
    }

    std::string field_;
    std::optional<std::size_t> line_;
};

/// Input that parses but violates a modelling assumption. `assumption` names
/// what failed, e.g. "A2" (convexity in y), "A5" (mapping), "params".
class ValidationError : public Error {
public:
    ValidationError(std::string assumption, const std::string& message)
        : Error("validation error (" + assumption + "): " + message),
          assumption_(std::move(assumption)) {}

    ExitCode exit_code() const noexcept override { return ExitCode::Validation; }
    const std::string& assumption() const noexcept { return assumption_; }

private:
    std::string assumption_;
};

class DimensionMismatch : public ValidationError {
public:
    DimensionMismatch(const std::string& where, std::size_t expected, std::size_t got)
        : ValidationError("dimension", where + ": expected dimension " + std::to_string(expected) +
                                           ", got " + std::to_string(got)) {}
};

class NonConvexInY : public ValidationError {
public:
    explicit NonConvexInY(const std::string& message) : ValidationError("A2", message) {}
};

class NotAFixedPoint : public ValidationError {
public:
    explicit NotAFixedPoint(const std::string& message) : ValidationError("fixed-point", message) {}
};

class NonConvergentTrajectory : public ValidationError {
public:
    explicit NonConvergentTrajectory(const std::string& message)
        : ValidationError("trajectory", message) {}
};

/// Failure inside an iterative numerical routine. The outer solver stamps the
/// iteration index on the way out.
class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& message) : Error(message), message_(message) {}

    ExitCode exit_code() const noexcept override { return ExitCode::Numerical; }
    const char* what() const noexcept override { return message_.c_str(); }

    std::optional<std::size_t> iteration() const noexcept { return iteration_; }
    void set_iteration(std::size_t k) {
        if (iteration_) return;
        iteration_ = k;
        message_ = "iteration " + std::to_string(k) + ": " + message_;
    }

private:
    std::string message_;
    std::optional<std::size_t> iteration_;
};

class NoConvergence : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class EmptyIntersection : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class InnerNoConvergence : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class LinesearchExhausted : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class ZeroSubgradient : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace eqfix
