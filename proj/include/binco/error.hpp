#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace binco {

// Base of every error raised by the library. The CLI maps subclasses onto
// exit codes: ConfigError -> 2, IoError -> 3, anything else -> 4.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class NumericalError : public Error {
public:
    using Error::Error;
};

class ZeroVarianceColumn : public Error {
public:
    explicit ZeroVarianceColumn(std::size_t column)
        : Error("column " + std::to_string(column) + " has zero variance"), column_(column) {}
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t column_;
};

class NonFiniteInput : public Error {
public:
    NonFiniteInput(std::size_t row, std::size_t col)
        : Error("non-finite entry at row " + std::to_string(row) + ", column " + std::to_string(col)),
          row_(row), col_(col) {}
    std::size_t row() const noexcept { return row_; }
    std::size_t col() const noexcept { return col_; }

private:
    std::size_t row_;
    std::size_t col_;
};

class InvalidPerturbationFloor : public ConfigError {
public:
    explicit InvalidPerturbationFloor(double l)
        : ConfigError("perturbation floor l=" + std::to_string(l) + " is outside (0, 1]") {}
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class IndexOutOfRange : public Error {
public:
    using Error::Error;
};

class QuadratureFailure : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class EmptyFitRange : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class OptimizerFailure : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class EmptyTail : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class DegenerateDensity : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class InconsistentTables : public Error {
public:
    using Error::Error;
};

class ThresholdTooLow : public Error {
public:
    using Error::Error;
};

class EmptySelection : public Error {
public:
    using Error::Error;
};

class UngraphicalDegreeSequence : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class CalibrationFailure : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class FactorizationFailure : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace binco
