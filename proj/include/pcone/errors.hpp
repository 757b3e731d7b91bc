#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace pcone {

class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// raised when the opening/branch constant admits no positive profile
class NoEigenfunctionError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

struct ScanRow {
    double x;
    double value;
    bool finite;
};

class RangeError : public NumericalError {
public:
    RangeError(const std::string& what, std::vector<ScanRow> scan = {})
        : NumericalError(what), scan_(std::move(scan)) {}
    const std::vector<ScanRow>& scan() const { return scan_; }

private:
    std::vector<ScanRow> scan_;
};

class ConvergenceError : public NumericalError {
public:
    ConvergenceError(const std::string& what, std::vector<double> history = {})
        : NumericalError(what), history_(std::move(history)) {}
    const std::vector<double>& history() const { return history_; }

private:
    std::vector<double> history_;
};

}  // namespace pcone
