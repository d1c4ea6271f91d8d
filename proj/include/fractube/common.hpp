#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

namespace fractube {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;

// Error taxonomy. The CLI maps these onto exit codes:
// ConfigError -> 2, BudgetError -> 3, everything else -> 3 as an internal guard.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

// Domain violations: poles, degenerate geometry, unsupported inputs.
class DomainError : public Error {
public:
    using Error::Error;
};

// Enumeration or search budget exhausted.
class BudgetError : public Error {
public:
    using Error::Error;
};

// Neumaier-compensated accumulator; order independent to ~1 ulp of the total
// for the sums used here.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

class ComplexCompensatedSum {
public:
    void add(cplx z) {
        re_.add(z.real());
        im_.add(z.imag());
    }
    cplx value() const { return {re_.value(), im_.value()}; }

private:
    CompensatedSum re_, im_;
};

}  // namespace fractube
