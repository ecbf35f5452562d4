#pragma once

namespace ssrf {

/// Lattice stencil weights c_d^{(1)} = 2d, c_d^{(2)} = 8d^2, c_d^{(3)} = 4d(d-1) that tie the
/// gradient and curvature energy terms to the semivariogram.
struct StencilCoefficients {
    double c1;
    double c2;
    double c3;
};

constexpr StencilCoefficients stencil_coefficients(int d) noexcept {
    const double dd = static_cast<double>(d);
    return {2.0 * dd, 8.0 * dd * dd, 4.0 * dd * (dd - 1.0)};
}

}  // namespace ssrf
