#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace ssrf {

enum class KernelFamily { triangular, quadratic, tricube, gaussian };

/// Normalized radial weighting kernel K(s), s = distance / bandwidth.
struct KernelSpec {
    KernelFamily family = KernelFamily::triangular;

    /// Support radius in normalized units. The gaussian kernel is treated as
    /// compact on [0, 8], where exp(-64) is below double resolution of K(0).
    [[nodiscard]] double support_radius() const noexcept;
    [[nodiscard]] std::string_view name() const noexcept;

    static KernelSpec from_name(std::string_view name);
};

inline constexpr double kGaussianCutoff = 8.0;

/// K(s). Throws ArgumentError for s < 0.
double kernel_eval(const KernelSpec& spec, double s);

/// Radial moment m_{K,j} = int_0^R s^{j-1} K(s) ds, closed form. Throws for j < 1.
double kernel_moment(const KernelSpec& spec, int j);

/// Radial moment of the squared kernel, int_0^R s^{j-1} K(s)^2 ds.
double kernel_moment_squared(const KernelSpec& spec, int j);

/// Adaptive-quadrature value of m_{K,j} (or of the K^2 moment). Independent of the
/// closed forms; used to cross-check them.
double kernel_moment_quadrature(const KernelSpec& spec, int j, bool squared = false);

/// B_p = m_{K,d+p} / m_{K,d}.
double moment_ratio(const KernelSpec& spec, int p, int d);

/// h1 = a1 * B_2^{-1/2}.
double bandwidth_for_gradient(double step, const KernelSpec& spec, int d);

/// h2 = a2 * B_4^{-1/4}.
double bandwidth_for_curvature(double step, const KernelSpec& spec, int d);

/// Leading asymptotic relative bias of the gradient estimator, (B_1 - B_2^{1/2}) / B_2^{1/2}.
double relative_bias_gradient(const KernelSpec& spec, int d);

/// Leading asymptotic relative bias of the curvature estimator, (B_1 - B_4^{1/4}) / B_4^{1/4}.
double relative_bias_curvature(const KernelSpec& spec, int d);

/// Moments of one kernel family at one dimension, computed once.
class MomentTable {
public:
    static constexpr int kMaxRatio = 6;

    MomentTable(const KernelSpec& spec, int dimension);

    [[nodiscard]] int dimension() const noexcept { return dimension_; }
    [[nodiscard]] const KernelSpec& kernel() const noexcept { return spec_; }

    /// m_{K,j} for 1 <= j <= dimension + kMaxRatio.
    [[nodiscard]] double m(int j) const;
    [[nodiscard]] double m2(int j) const;
    /// B_p for 1 <= p <= kMaxRatio.
    [[nodiscard]] double B(int p) const;

private:
    KernelSpec spec_;
    int dimension_;
    std::vector<double> m_;
    std::vector<double> m2_;
    std::array<double, kMaxRatio + 1> b_{};
};

/// Row of the asymptotic-bias table for one kernel.
struct BiasConstants {
    double b1_2 = 0.0;  // B_1 - B_2^{1/2}
    double b2 = 0.0;
    double psi1 = 0.0;
    double b1_4 = 0.0;  // B_1 - B_4^{1/4}
    double b4 = 0.0;
    double psi2 = 0.0;
};

BiasConstants bias_constants(const KernelSpec& spec, int d);

}  // namespace ssrf
