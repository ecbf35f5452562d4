#pragma once

#include <functional>
#include <span>

namespace ssrf {

/// Settings for the adaptive quadrature used by the spectral integrals.
struct QuadratureConfig {
    double relative_tolerance = 1e-8;
    int max_subdivisions = 256;
    /// Split oscillatory Bessel integrands at half-period breakpoints.
    bool oscillatory_split = true;

    /// Throws ArgumentError unless 0 < relative_tolerance <= 1e-3 and max_subdivisions >= 16.
    void validate() const;
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;  // absolute error estimate
    double l1 = 0.0;     // integral of |f|
};

/// Adaptive Gauss-Kronrod integral of f over [lo, hi], optionally split at the
/// given interior breakpoints (ignored if outside (lo, hi)). Throws NumericError
/// when the accumulated error estimate exceeds the configured tolerance
/// relative to the L1 norm of the integrand.
QuadratureResult integrate(const std::function<double(double)>& f, double lo, double hi,
                           const QuadratureConfig& config, std::span<const double> breakpoints = {});

}  // namespace ssrf
