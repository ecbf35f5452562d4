#include "ssrf/spectral.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include <boost/math/special_functions/bessel.hpp>

#include "ssrf/coefficients.hpp"
#include "ssrf/errors.hpp"

namespace ssrf {

namespace {

constexpr double kPermissibilityFloor = 1e-12;
constexpr double kOscillationThreshold = 20.0;
// Zeros of J_nu skipped between breakpoints, so each piece spans about two periods.
constexpr int kZerosPerPiece = 4;

void require_dimension(int d) {
    if (d < 1) {
        throw ArgumentError("dimension must be >= 1");
    }
}

bool is_half_integer(double nu) {
    const double twice = 2.0 * nu;
    return std::abs(twice - std::round(twice)) < 1e-12;
}

// J_nu(x) / x^nu, an entire function of x; equals 1 / (2^nu Gamma(nu + 1)) at the origin.
double bessel_ratio(double nu, double x) {
    if (x < 1e-2) {
        const double lead = 1.0 / (std::pow(2.0, nu) * std::tgamma(nu + 1.0));
        const double x2 = x * x;
        return lead * (1.0 - x2 / (4.0 * (nu + 1.0)) + x2 * x2 / (32.0 * (nu + 1.0) * (nu + 2.0)));
    }
    if (nu == -0.5) {
        return std::sqrt(2.0 / std::numbers::pi) * std::cos(x);
    }
    if (nu == 0.5) {
        return std::sqrt(2.0 / std::numbers::pi) * std::sin(x) / x;
    }
    return bessel_j(nu, x) / std::pow(x, nu);
}

// Integral over u = k xi in [0, kc xi] of 2 u^{d-1} Lambda(lag u / xi) / Pi(u^2), where
// Lambda = J_{d/2-1}(x) / x^{d/2-1}. Returns G(lag) * 2 (2 pi)^{d/2} / eta0.
double reduced_covariance_integral(const SsrfParams& p, double lag, int d, const QuadratureConfig& q) {
    const double nu = 0.5 * d - 1.0;
    const double freq = lag / p.xi;
    const double upper = p.kc_xi();
    auto integrand = [&](double u) {
        return 2.0 * std::pow(u, d - 1) * bessel_ratio(nu, freq * u) / pi_poly(p.eta1, u * u);
    };

    std::vector<double> breaks;
    if (q.oscillatory_split && freq * upper > kOscillationThreshold) {
        // Asymptotic zeros of J_nu: (k + nu/2 - 1/4) pi.
        for (int k = kZerosPerPiece;; k += kZerosPerPiece) {
            const double x = (k + 0.5 * nu - 0.25) * std::numbers::pi;
            const double u = x / freq;
            if (u >= upper) {
                break;
            }
            breaks.push_back(u);
        }
    }
    return integrate(integrand, 0.0, upper, q, breaks).value;
}

double variance_prefactor(int d) {
    return 1.0 / (std::pow(2.0, d) * std::pow(std::numbers::pi, 0.5 * d) * gamma_half(d));
}

}  // namespace

double pi_poly(double eta1, double v) { return 1.0 + eta1 * v + v * v; }

double band_minimum(double eta1, double kc_xi) {
    const double top = kc_xi * kc_xi;
    const double vertex = -0.5 * eta1;
    if (vertex <= 0.0) {
        return 1.0;
    }
    return pi_poly(eta1, std::min(vertex, top));
}

void require_permissible(const SsrfParams& params) {
    if (!(params.xi > 0.0) || !(params.kc > 0.0) || !(params.eta0 > 0.0)) {
        throw PermissibilityError("SSRF parameters require eta0, xi, kc > 0", 1.0);
    }
    const double lowest = band_minimum(params.eta1, params.kc_xi());
    if (!(lowest > kPermissibilityFloor)) {
        std::ostringstream os;
        os << "impermissible SSRF parameters: min Pi(v) over the band is " << lowest
           << " (eta1 = " << params.eta1 << ", kc*xi = " << params.kc_xi() << ")";
        throw PermissibilityError(os.str(), kPermissibilityFloor - lowest);
    }
}

double bessel_j(double nu, double x) {
    if (!(x >= 0.0)) {
        throw ArgumentError("bessel_j requires x >= 0");
    }
    if (!(nu >= -0.5) || !is_half_integer(nu)) {
        throw ArgumentError("bessel_j supports half-integer orders nu >= -1/2 only");
    }
    if (nu == -0.5) {
        if (x == 0.0) {
            throw ArgumentError("J_{-1/2} is singular at x = 0");
        }
        return std::sqrt(2.0 / (std::numbers::pi * x)) * std::cos(x);
    }
    if (nu == 0.5) {
        if (x == 0.0) {
            return 0.0;
        }
        return std::sqrt(2.0 / (std::numbers::pi * x)) * std::sin(x);
    }
    const double order = std::round(nu);
    if (order == nu) {
        return boost::math::cyl_bessel_j(static_cast<int>(order), x);
    }
    return boost::math::cyl_bessel_j(nu, x);
}

double gamma_half(int d) {
    require_dimension(d);
    switch (d) {
        case 1: return std::sqrt(std::numbers::pi);
        case 2: return 1.0;
        case 3: return 0.5 * std::sqrt(std::numbers::pi);
        case 4: return 1.0;
        default: return std::tgamma(0.5 * d);
    }
}

double normalization_integral(double eta1, double kc_xi, int d, const QuadratureConfig& q) {
    require_dimension(d);
    if (!(kc_xi >= 0.0)) {
        throw ArgumentError("kc*xi must be nonnegative");
    }
    if (kc_xi == 0.0) {
        return 0.0;
    }
    if (!(band_minimum(eta1, kc_xi) > kPermissibilityFloor)) {
        throw PermissibilityError("Pi(v) vanishes on the band", kPermissibilityFloor - band_minimum(eta1, kc_xi));
    }
    // v = u^2 maps v^{d/2-1} dv to 2 u^{d-1} du and removes the d = 1 endpoint singularity.
    auto integrand = [&](double u) { return 2.0 * std::pow(u, d - 1) / pi_poly(eta1, u * u); };
    return integrate(integrand, 0.0, kc_xi, q).value;
}

double variance_constraint(const SsrfParams& params, int d, const QuadratureConfig& q) {
    require_permissible(params);
    return params.eta0 * variance_prefactor(d) * normalization_integral(params.eta1, params.kc_xi(), d, q);
}

double covariance(const SsrfParams& params, double lag, int d, const QuadratureConfig& q) {
    require_dimension(d);
    if (!(lag >= 0.0)) {
        throw ArgumentError("covariance lag must be nonnegative");
    }
    if (lag == 0.0) {
        return variance_constraint(params, d, q);
    }
    require_permissible(params);
    const double scale = params.eta0 / (2.0 * std::pow(2.0 * std::numbers::pi, 0.5 * d));
    return scale * reduced_covariance_integral(params, lag, d, q);
}

double semivariogram(const SsrfParams& params, double lag, int d, const QuadratureConfig& q) {
    if (lag == 0.0) {
        return 0.0;
    }
    return covariance(params, 0.0, d, q) - covariance(params, lag, d, q);
}

StochasticConstraint gradient_stoch(const SsrfParams& params, double a1, int d, const QuadratureConfig& q) {
    if (!(a1 > 0.0)) {
        throw ArgumentError("gradient step must be positive");
    }
    const auto c = stencil_coefficients(d);
    StochasticConstraint out;
    out.phi = c.c1 * semivariogram(params, a1, d, q);
    out.s = out.phi / (a1 * a1);
    return out;
}

StochasticConstraint curvature_stoch(const SsrfParams& params, double a2, int d, const QuadratureConfig& q) {
    if (!(a2 > 0.0)) {
        throw ArgumentError("curvature step must be positive");
    }
    const auto c = stencil_coefficients(d);
    const double g0 = covariance(params, 0.0, d, q);
    const double f1 = g0 - covariance(params, a2, d, q);
    const double f2 = g0 - covariance(params, std::sqrt(2.0) * a2, d, q);
    const double f4 = g0 - covariance(params, 2.0 * a2, d, q);
    StochasticConstraint out;
    out.phi = c.c2 * f1 - c.c3 * f2 - c.c1 * f4;
    out.s = out.phi / std::pow(a2, 4);
    return out;
}

EnsembleConstraints ensemble_constraints(const SsrfParams& params, double step, int d,
                                         const QuadratureConfig& q) {
    if (!(step > 0.0)) {
        throw ArgumentError("step must be positive");
    }
    require_permissible(params);
    const auto c = stencil_coefficients(d);
    EnsembleConstraints out;
    out.s0prime = normalization_integral(params.eta1, params.kc_xi(), d, q);
    out.s0 = params.eta0 * variance_prefactor(d) * out.s0prime;
    const double f1 = out.s0 - covariance(params, step, d, q);
    const double f2 = out.s0 - covariance(params, std::sqrt(2.0) * step, d, q);
    const double f4 = out.s0 - covariance(params, 2.0 * step, d, q);
    out.gradient.phi = c.c1 * f1;
    out.gradient.s = out.gradient.phi / (step * step);
    out.curvature.phi = c.c2 * f1 - c.c3 * f2 - c.c1 * f4;
    out.curvature.s = out.curvature.phi / std::pow(step, 4);
    return out;
}

double eta0_from_variance(double sigma2, int d) {
    require_dimension(d);
    if (!(sigma2 > 0.0)) {
        throw ArgumentError("variance must be positive to recover eta0");
    }
    return sigma2 / variance_prefactor(d);
}

}  // namespace ssrf
