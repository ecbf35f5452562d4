#pragma once

#include "ssrf/quadrature.hpp"

namespace ssrf {

/// SSRF parameter vector (eta0, eta1, xi, kc).
///
/// The covariance spectral density is eta0 xi^d / (1 + eta1 (k xi)^2 + (k xi)^4) for
/// k <= kc and zero above the cutoff (boxcar coarse-graining kernel).
struct SsrfParams {
    double eta0 = 1.0;  // scale coefficient
    double eta1 = 1.0;  // shape coefficient
    double xi = 1.0;    // characteristic length
    double kc = 1.0;    // wavevector cutoff

    [[nodiscard]] double kc_xi() const noexcept { return kc * xi; }
};

/// Pi(v) = 1 + eta1 v + v^2.
double pi_poly(double eta1, double v);

/// Minimum of Pi over the band v in [0, kc_xi^2].
double band_minimum(double eta1, double kc_xi);

/// Throws PermissibilityError unless Pi(v) > 1e-12 on the band and xi, kc, eta0 > 0.
void require_permissible(const SsrfParams& params);

/// Bessel function of the first kind for half-integer orders nu >= -1/2.
double bessel_j(double nu, double x);

/// Gamma(d/2), closed form for d <= 4.
double gamma_half(int d);

/// S0' = int_0^{(kc xi)^2} dv v^{d/2-1} / Pi(v).
double normalization_integral(double eta1, double kc_xi, int d, const QuadratureConfig& q = {});

/// E[S0] = eta0 / (2^d pi^{d/2} Gamma(d/2)) * S0'.
double variance_constraint(const SsrfParams& params, int d, const QuadratureConfig& q = {});

/// Covariance G(a) of the band-limited SSRF; G(0) equals variance_constraint.
double covariance(const SsrfParams& params, double lag, int d, const QuadratureConfig& q = {});

/// F(a) = G(0) - G(a).
double semivariogram(const SsrfParams& params, double lag, int d, const QuadratureConfig& q = {});

struct StochasticConstraint {
    double phi = 0.0;  // step-free form
    double s = 0.0;    // phi / a^2 (gradient) or phi / a^4 (curvature)
};

/// phi1(a) = c1 F(a), S1 = phi1 / a^2.
StochasticConstraint gradient_stoch(const SsrfParams& params, double a1, int d,
                                    const QuadratureConfig& q = {});

/// phi2(a) = c2 F(a) - c3 F(sqrt2 a) - c1 F(2a), S2 = phi2 / a^4.
StochasticConstraint curvature_stoch(const SsrfParams& params, double a2, int d,
                                     const QuadratureConfig& q = {});

/// All ensemble quantities needed by the fit objective at a common step, sharing G(0).
struct EnsembleConstraints {
    double s0 = 0.0;      // E[S0]
    double s0prime = 0.0; // S0'
    StochasticConstraint gradient;
    StochasticConstraint curvature;
};

EnsembleConstraints ensemble_constraints(const SsrfParams& params, double step, int d,
                                         const QuadratureConfig& q = {});

/// eta0 = 2^d pi^{d/2} Gamma(d/2) sigma^2; makes E[S0] = sigma^2 when S0' = 1.
double eta0_from_variance(double sigma2, int d);

}  // namespace ssrf
