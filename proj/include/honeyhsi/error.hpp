#pragma once

#include <stdexcept>
#include <string>

namespace honeyhsi {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operand dimensions do not agree, or a matrix lacks a required structure.
class ShapeError : public Error {
public:
    using Error::Error;
};

class NotPositiveDefiniteError : public Error {
public:
    using Error::Error;
};

class SingularError : public Error {
public:
    using Error::Error;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Invalid user-supplied argument (counts, ranges, empty inputs).
class ArgumentError : public Error {
public:
    using Error::Error;
};

class LookupError : public Error {
public:
    using Error::Error;
};

/// Input text could not be parsed. Row and column are 1-based; 0 means "not applicable".
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t row = 0, std::string column = {})
        : Error(format(message, row, column)), row_(row), column_(std::move(column)) {}

    std::size_t row() const noexcept { return row_; }
    const std::string& column() const noexcept { return column_; }

private:
    static std::string format(const std::string& message, std::size_t row, const std::string& column) {
        std::string out;
        if (row > 0) out += "row " + std::to_string(row);
        if (!column.empty()) out += (out.empty() ? "column '" : ", column '") + column + "'";
        if (!out.empty()) out += ": ";
        return out + message;
    }

    std::size_t row_;
    std::string column_;
};

/// Spectra carry a different number of bands than expected.
class BandCountError : public ParseError {
public:
    using ParseError::ParseError;
};

/// Model fitting failed because the training data does not satisfy a precondition.
class FitError : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    using Error::Error;
};

}  // namespace honeyhsi
