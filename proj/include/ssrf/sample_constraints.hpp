#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ssrf/kernels.hpp"

namespace ssrf {

/// n sampling locations in R^d (rows of `locations`) and one value per location.
struct SampleData {
    Eigen::MatrixXd locations;  // n x d
    Eigen::VectorXd values;     // n

    [[nodiscard]] Eigen::Index size() const noexcept { return locations.rows(); }
    [[nodiscard]] int dimension() const noexcept { return static_cast<int>(locations.cols()); }

    /// Throws DegenerateDataError for n < 2 or non-finite entries, ArgumentError on shape mismatch.
    void validate() const;
};

struct ConstraintOptions {
    /// Minimum number of (unordered) pairs with nonzero kernel weight per average.
    std::size_t min_pairs = 10;
    /// Number of nearest neighbors per point entering the step estimate.
    int neighbors = 1;
    /// Bin locations on a uniform grid of cell size R*h instead of the plain double loop.
    bool use_grid = false;
    /// Refine h by fixed-point iteration on <s^2>_h = a^2 (resp. <s^4>_h = a^4).
    bool refine_bandwidth = false;
    int refine_iterations = 50;
    double refine_tolerance = 1e-10;
};

struct ConstraintEstimates {
    int dimension = 0;
    std::string kernel;
    double s0_bar = 0.0;
    double phi1_bar = 0.0;
    double phi2_bar = 0.0;
    double s1_bar = 0.0;  // phi1_bar / a1^2
    double s2_bar = 0.0;  // phi2_bar / a2^4
    double a1 = 0.0;
    double a2 = 0.0;
    double h1 = 0.0;
    double h2 = 0.0;
    double mu1 = 1.0;
    double mu2 = 1.0;
};

/// Two-point payload A(i, j, s_ij) averaged by kernel_pair_average.
using PairPayload = std::function<double(Eigen::Index, Eigen::Index, double)>;

/// Kernel-weighted sums over ordered pairs i != j at one bandwidth.
struct PairMoments {
    double weight = 0.0;     // sum K
    double s2 = 0.0;         // sum K s^2
    double s4 = 0.0;         // sum K s^4
    double increment2 = 0.0; // sum K (X_i - X_j)^2, zero when no values are given
    std::size_t pairs = 0;   // unordered pairs with K > 0

    [[nodiscard]] double mean_s2() const { return s2 / weight; }
    [[nodiscard]] double mean_s4() const { return s4 / weight; }
    [[nodiscard]] double mean_increment2() const { return increment2 / weight; }
};

/// Power mean (1/N0 sum Delta^d)^{1/d} of near-neighbor distances. Throws
/// DegenerateDataError on duplicate locations.
double estimate_step(const Eigen::MatrixXd& locations, int neighbors = 1);

/// Sums of K(s/h), K s^2, K s^4 and K (X_i - X_j)^2; `values` may be empty.
/// Throws InsufficientPairsError when fewer than opts.min_pairs pairs contribute.
PairMoments pair_moments(const Eigen::MatrixXd& locations, const Eigen::VectorXd& values, double h,
                         const KernelSpec& spec, const ConstraintOptions& opts = {});

/// sum' K A / sum' K over ordered pairs i != j.
double kernel_pair_average(const Eigen::MatrixXd& locations, double h, const KernelSpec& spec,
                           const PairPayload& payload, const ConstraintOptions& opts = {});

/// <s^power>_h.
double kernel_distance_moment(const Eigen::MatrixXd& locations, double h, const KernelSpec& spec,
                              int power, const ConstraintOptions& opts = {});

/// Half the kernel average of squared increments.
double f_bar(const SampleData& data, double h, const KernelSpec& spec, const ConstraintOptions& opts = {});

/// (1/n) sum (X_i - mean)^2.
double sample_variance(const SampleData& data);

struct GradientEstimate {
    double phi1_bar = 0.0;
    double s1_bar = 0.0;
    double h1 = 0.0;
};

GradientEstimate gradient_constraint(const SampleData& data, const KernelSpec& spec, double a1,
                                     const ConstraintOptions& opts = {});

struct MuCoefficients {
    double mu1 = 1.0;
    double mu2 = 1.0;
};

/// Topology coefficients of the curvature estimator from <s^2>, <s^4> at h2, sqrt2 h2, 2 h2.
/// Throws DegenerateLayoutError for d = 1 or a vanishing denominator.
MuCoefficients mu_coefficients(const Eigen::MatrixXd& locations, const KernelSpec& spec, double h2,
                               const ConstraintOptions& opts = {});

struct CurvatureEstimate {
    double phi2_bar = 0.0;
    double s2_bar = 0.0;
    double h2 = 0.0;
    double mu1 = 1.0;
    double mu2 = 1.0;
};

/// For d = 1 the sqrt2 term is absent and mu2 is fixed to 1.
CurvatureEstimate curvature_constraint(const SampleData& data, const KernelSpec& spec, double a2,
                                       const ConstraintOptions& opts = {});

/// Values on a full hypercubic lattice, row-major with the last axis fastest.
struct LatticeField {
    std::vector<std::size_t> shape;
    double spacing = 1.0;
    std::vector<double> values;
};

struct LatticeConstraints {
    double s0 = 0.0;
    double s1 = 0.0;
    double s2 = 0.0;
};

/// Site averages of the lattice energy terms. S0 uses mean-removed values, S1 forward
/// differences, S2 centered second differences at interior sites.
LatticeConstraints lattice_constraints(const LatticeField& field);

ConstraintEstimates estimate_all(const SampleData& data, const KernelSpec& spec,
                                 const ConstraintOptions& opts = {});

}  // namespace ssrf
