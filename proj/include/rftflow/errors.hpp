#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rftflow {

/// Root of the library's exception hierarchy.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or invalid chain-specification text. Carries a 1-based
/// source position when one is known (line == 0 otherwise).
class SpecError : public Error {
public:
    SpecError(const std::string& what, std::size_t line = 0, std::size_t column = 0);

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }
    const std::string& message() const noexcept { return message_; }

private:
    std::string message_;
    std::size_t line_;
    std::size_t column_;
};

/// Structural problem found while building the quotient graph
/// (disconnected graph, unknown root, ...). Reported like a spec error.
class GraphError : public SpecError {
public:
    using SpecError::SpecError;
};

/// Numerical condition: divergence, singular system, infinite entropy.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Expression evaluated outside its domain (ln of a non-positive value,
/// division by zero, overflow) at a given index.
class ExprDomainError : public NumericalError {
public:
    ExprDomainError(const std::string& what, long long k);
    long long index() const noexcept { return k_; }
    /// The message without the trailing index.
    const std::string& detail() const noexcept { return detail_; }

private:
    std::string detail_;
    long long k_;
};

/// A series does not converge at the requested point.
class DivergenceError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// A combinatorial or iteration budget ran out before an exact answer.
class BudgetExceeded : public Error {
public:
    using Error::Error;
};

} // namespace rftflow
