#pragma once

#include <stdexcept>
#include <string>

namespace rydbist {

/// Base for failures of the numerical pipeline (CLI exit code 3).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or out-of-range configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& message)
        : std::runtime_error(key.empty() ? message : key + ": " + message), key_(std::move(key))
    {
    }
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

class DegenerateSteadyState : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class RootScanInconclusive : public NumericalError {
public:
    RootScanInconclusive(double lo, double hi, const std::string& message)
        : NumericalError(message), lo_(lo), hi_(hi)
    {
    }
    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }

private:
    double lo_, hi_;
};

class StepSizeTooLarge : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class BranchTrackingFailed : public NumericalError {
public:
    BranchTrackingFailed(double delta_c, const std::string& message)
        : NumericalError(message), delta_c_(delta_c)
    {
    }
    double delta_c() const noexcept { return delta_c_; }

private:
    double delta_c_;
};

class DegenerateAbscissa : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class FlatSpectrum : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class NotFarDetuned : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class InsufficientCalibration : public NumericalError {
public:
    using NumericalError::NumericalError;
};

} // namespace rydbist
