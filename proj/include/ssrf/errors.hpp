#pragma once

#include <stdexcept>
#include <string>

namespace ssrf {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid argument: out-of-domain scalar, unknown name, malformed input.
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// Sample data that cannot support an estimate (duplicates, too few points).
class DegenerateDataError : public Error {
public:
    using Error::Error;
};

/// Too few sample pairs inside the kernel support at a given bandwidth.
class InsufficientPairsError : public Error {
public:
    InsufficientPairsError(double bandwidth, std::size_t pairs, std::size_t required);

    [[nodiscard]] double bandwidth() const noexcept { return bandwidth_; }
    [[nodiscard]] std::size_t pairs() const noexcept { return pairs_; }

private:
    double bandwidth_;
    std::size_t pairs_;
};

/// Sampling layout for which the curvature coefficients are undefined.
class DegenerateLayoutError : public Error {
public:
    using Error::Error;
};

/// SSRF parameters outside the Bochner-permissible region.
class PermissibilityError : public Error {
public:
    PermissibilityError(const std::string& what, double violation);

    [[nodiscard]] double violation() const noexcept { return violation_; }

private:
    double violation_;
};

/// Numerical failure: quadrature non-convergence, non-PD factorization, singular solve.
class NumericError : public Error {
public:
    explicit NumericError(const std::string& what, double achieved = 0.0, long index = -1);

    /// Achieved error estimate for quadrature failures.
    [[nodiscard]] double achieved() const noexcept { return achieved_; }
    /// Failing pivot / row index for factorization failures, -1 otherwise.
    [[nodiscard]] long index() const noexcept { return index_; }

private:
    double achieved_;
    long index_;
};

}  // namespace ssrf
