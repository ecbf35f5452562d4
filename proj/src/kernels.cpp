#include "ssrf/kernels.hpp"

#include <cmath>
#include <string>

#include "ssrf/errors.hpp"
#include "ssrf/quadrature.hpp"

namespace ssrf {

double KernelSpec::support_radius() const noexcept {
    return family == KernelFamily::gaussian ? kGaussianCutoff : 1.0;
}

std::string_view KernelSpec::name() const noexcept {
    switch (family) {
        case KernelFamily::triangular: return "triangular";
        case KernelFamily::quadratic: return "quadratic";
        case KernelFamily::tricube: return "tricube";
        case KernelFamily::gaussian: return "gaussian";
    }
    return "unknown";
}

KernelSpec KernelSpec::from_name(std::string_view name) {
    if (name == "triangular") return {KernelFamily::triangular};
    if (name == "quadratic") return {KernelFamily::quadratic};
    if (name == "tricube") return {KernelFamily::tricube};
    if (name == "gaussian") return {KernelFamily::gaussian};
    throw ArgumentError("unknown kernel family '" + std::string(name) +
                        "' (expected triangular | quadratic | tricube | gaussian)");
}

double kernel_eval(const KernelSpec& spec, double s) {
    if (!(s >= 0.0)) {
        throw ArgumentError("kernel argument must be nonnegative");
    }
    if (s >= spec.support_radius()) {
        return 0.0;
    }
    switch (spec.family) {
        case KernelFamily::triangular: return 1.0 - s;
        case KernelFamily::quadratic: return 1.0 - s * s;
        case KernelFamily::tricube: {
            const double t = 1.0 - s * s * s;
            return t * t * t;
        }
        case KernelFamily::gaussian: return std::exp(-s * s);
    }
    return 0.0;
}

namespace {

void require_order(int j) {
    if (j < 1) {
        throw ArgumentError("kernel moment order must be >= 1");
    }
}

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
    }
    return r;
}

// int_0^1 s^{j-1} (1 - s^q)^p ds, expanded binomially.
double polynomial_moment(int j, int q, int p) {
    double sum = 0.0;
    for (int k = 0; k <= p; ++k) {
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        sum += sign * binomial(p, k) / static_cast<double>(j + q * k);
    }
    return sum;
}

}  // namespace

double kernel_moment(const KernelSpec& spec, int j) {
    require_order(j);
    switch (spec.family) {
        case KernelFamily::triangular: return 1.0 / (static_cast<double>(j) * (j + 1));
        case KernelFamily::quadratic: return 2.0 / (static_cast<double>(j) * (j + 2));
        case KernelFamily::tricube: return polynomial_moment(j, 3, 3);
        case KernelFamily::gaussian: return 0.5 * std::tgamma(0.5 * j);
    }
    return 0.0;
}

double kernel_moment_squared(const KernelSpec& spec, int j) {
    require_order(j);
    switch (spec.family) {
        case KernelFamily::triangular: return polynomial_moment(j, 1, 2);
        case KernelFamily::quadratic: return polynomial_moment(j, 2, 2);
        case KernelFamily::tricube: return polynomial_moment(j, 3, 6);
        case KernelFamily::gaussian: return 0.5 * std::tgamma(0.5 * j) / std::pow(2.0, 0.5 * j);
    }
    return 0.0;
}

double kernel_moment_quadrature(const KernelSpec& spec, int j, bool squared) {
    require_order(j);
    QuadratureConfig q;
    q.relative_tolerance = 1e-13;
    q.max_subdivisions = 4096;
    auto f = [&](double s) {
        const double k = kernel_eval(spec, s);
        return std::pow(s, j - 1) * (squared ? k * k : k);
    };
    return integrate(f, 0.0, spec.support_radius(), q).value;
}

double moment_ratio(const KernelSpec& spec, int p, int d) {
    if (p < 1 || d < 1) {
        throw ArgumentError("moment ratio requires p >= 1 and d >= 1");
    }
    return kernel_moment(spec, d + p) / kernel_moment(spec, d);
}

double bandwidth_for_gradient(double step, const KernelSpec& spec, int d) {
    if (!(step > 0.0)) {
        throw ArgumentError("gradient step must be positive");
    }
    return step / std::sqrt(moment_ratio(spec, 2, d));
}

double bandwidth_for_curvature(double step, const KernelSpec& spec, int d) {
    if (!(step > 0.0)) {
        throw ArgumentError("curvature step must be positive");
    }
    return step / std::pow(moment_ratio(spec, 4, d), 0.25);
}

double relative_bias_gradient(const KernelSpec& spec, int d) {
    const double root = std::sqrt(moment_ratio(spec, 2, d));
    return (moment_ratio(spec, 1, d) - root) / root;
}

double relative_bias_curvature(const KernelSpec& spec, int d) {
    const double root = std::pow(moment_ratio(spec, 4, d), 0.25);
    return (moment_ratio(spec, 1, d) - root) / root;
}

MomentTable::MomentTable(const KernelSpec& spec, int dimension) : spec_(spec), dimension_(dimension) {
    if (dimension < 1) {
        throw ArgumentError("moment table dimension must be >= 1");
    }
    const int top = dimension + kMaxRatio;
    m_.resize(static_cast<std::size_t>(top) + 1);
    m2_.resize(static_cast<std::size_t>(top) + 1);
    for (int j = 1; j <= top; ++j) {
        m_[j] = kernel_moment(spec, j);
        m2_[j] = kernel_moment_squared(spec, j);
    }
    for (int p = 1; p <= kMaxRatio; ++p) {
        b_[p] = m_[dimension + p] / m_[dimension];
    }
}

double MomentTable::m(int j) const {
    if (j < 1 || j >= static_cast<int>(m_.size())) {
        throw ArgumentError("moment order outside the cached range");
    }
    return m_[j];
}

double MomentTable::m2(int j) const {
    if (j < 1 || j >= static_cast<int>(m2_.size())) {
        throw ArgumentError("moment order outside the cached range");
    }
    return m2_[j];
}

double MomentTable::B(int p) const {
    if (p < 1 || p > kMaxRatio) {
        throw ArgumentError("moment ratio order outside the cached range");
    }
    return b_[p];
}

BiasConstants bias_constants(const KernelSpec& spec, int d) {
    const MomentTable t(spec, d);
    BiasConstants c;
    c.b2 = t.B(2);
    c.b4 = t.B(4);
    const double r2 = std::sqrt(c.b2);
    const double r4 = std::pow(c.b4, 0.25);
    c.b1_2 = t.B(1) - r2;
    c.psi1 = c.b1_2 / r2;
    c.b1_4 = t.B(1) - r4;
    c.psi2 = c.b1_4 / r4;
    return c;
}

}  // namespace ssrf
