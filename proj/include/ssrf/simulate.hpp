#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "ssrf/quadrature.hpp"
#include "ssrf/rng.hpp"
#include "ssrf/spectral.hpp"

namespace ssrf {

enum class ModelFamily { spherical, exponential, gaussian, ssrf };

struct CovarianceModel {
    ModelFamily family = ModelFamily::exponential;
    double sigma2 = 1.0;  // ignored for ssrf (variance follows from the parameters)
    double range = 1.0;   // b_s, b_e or b_g
    SsrfParams ssrf;
    int dimension = 2;    // used by ssrf and by the spherical validity check
    QuadratureConfig quadrature;

    [[nodiscard]] std::string_view name() const noexcept;
    /// Variance at lag 0.
    [[nodiscard]] double variance() const;
    void validate() const;

    static ModelFamily family_from_name(std::string_view name);
};

using CovarianceFunction = std::function<double(double)>;

/// spherical: s2 (1 - 1.5 r/b + 0.5 (r/b)^3) for r <= b; exponential: s2 exp(-r/b);
/// gaussian: s2 exp(-r^2/b^2); ssrf: spectral covariance by quadrature.
double model_covariance(const CovarianceModel& model, double r);

/// Callable covariance for lags in [0, max_lag]. Classical models are evaluated exactly;
/// ssrf is tabulated at `nodes` equally spaced lags (exact at 0) and interpolated with a
/// cubic B-spline, falling back to quadrature beyond max_lag.
CovarianceFunction make_covariance_function(const CovarianceModel& model, double max_lag, int nodes = 2049);

struct Box {
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;

    [[nodiscard]] int dimension() const noexcept { return static_cast<int>(lower.size()); }
    void validate() const;

    static Box cube(int d, double lo, double hi);
};

struct SimulationPlan {
    std::size_t n = 200;
    Box domain = Box::cube(2, 0.0, 5.0);
    CovarianceModel model;
    double mean = 0.0;
    int replicates = 1;
    std::uint64_t seed = 0;

    void validate() const;
};

/// n i.i.d. uniform points in the box, one row each.
Eigen::MatrixXd sample_locations(std::size_t n, const Box& box, Rng& rng);
Eigen::MatrixXd sample_locations(const SimulationPlan& plan, Rng& rng);

Eigen::MatrixXd covariance_matrix(const Eigen::MatrixXd& locations, const CovarianceFunction& cov);
Eigen::MatrixXd covariance_matrix(const Eigen::MatrixXd& locations, const CovarianceModel& model);

/// Lower factor L with L L^T = C. Throws NumericError carrying the failing pivot index.
Eigen::MatrixXd cholesky(const Eigen::MatrixXd& c);

/// Cholesky factor of C; on failure adds 1e-10 * C(0,0) to the diagonal once and retries.
Eigen::MatrixXd factor_covariance(const Eigen::MatrixXd& c);

/// mean + L z with z i.i.d. standard normal drawn from rng.
Eigen::VectorXd gaussian_field_from_factor(const Eigen::MatrixXd& factor, double mean, Rng& rng);

Eigen::VectorXd gaussian_field(const Eigen::MatrixXd& locations, const CovarianceModel& model, double mean,
                               Rng& rng);

struct Realization {
    Eigen::MatrixXd locations;
    Eigen::VectorXd values;
};

/// Replicate m of a plan: fresh locations and field from Rng(seed XOR m).
Realization simulate_replicate(const SimulationPlan& plan, std::uint64_t m);

}  // namespace ssrf
