#pragma once

#include <stdexcept>
#include <string>

namespace bpl {

enum class ErrorKind {
    InvalidSpec,
    TooLarge,
    ZeroPermanent,
    DimensionMismatch,
    NotConverged,
    DomainError,
    NumericalFailure,
    DegenerateSpectrum,
    BoundsMismatch,
    NonzeroConstantTerm,
    DegenerateFrame,
    NonPositiveHessian,
    InsufficientData,
};

const char* error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

// Iterative solvers that hit their cap throw this with the last iterate attached.
template <class Result>
class NotConverged : public Error {
public:
    NotConverged(const std::string& what, Result last)
        : Error(ErrorKind::NotConverged, what), last_(std::move(last)) {}

    const Result& last() const { return last_; }

private:
    Result last_;
};

}  // namespace bpl
