#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ssrf/inference.hpp"
#include "ssrf/kernels.hpp"
#include "ssrf/kriging.hpp"
#include "ssrf/simulate.hpp"

namespace ssrf {

/// Runs body(0..count-1) on `jobs` worker threads. Each index runs exactly once;
/// the first exception thrown is rethrown after all workers finish.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& body);

/// `intervals` + 1 equally spaced lags on [0, max_lag].
std::vector<double> lag_grid(double max_lag = 1.2, int intervals = 10);

// ---------------------------------------------------------------------------
// Asymptotic-bias constants

struct BiasTableRow {
    std::string kernel;
    BiasConstants constants;
    /// Set for the triangular kernel, whose commonly quoted B2, B4 (1/5, 1/14) differ from
    /// the moment definition (3/10, 1/7 at d = 2).
    bool reference_mismatch = false;
};

std::vector<BiasTableRow> bias_table(const std::vector<KernelSpec>& kernels, int d);
std::string bias_table_csv(const std::vector<BiasTableRow>& rows);

// ---------------------------------------------------------------------------
// Fitted covariance curves over simulated replicates

struct CovExperimentConfig {
    std::vector<CovarianceModel> models;
    std::size_t n = 200;
    Box domain = Box::cube(2, 0.0, 5.0);
    double mean = 0.0;
    int replicates = 100;
    std::uint64_t seed = 1;
    KernelSpec kernel{KernelFamily::triangular};
    FitConfig fit;
    QuadratureConfig quadrature;
    std::vector<double> lags = lag_grid();
    int jobs = 1;
};

struct ReplicateCurve {
    bool ok = false;
    std::string error;
    FitResult fit;
    std::vector<double> correlation;  // fitted G(r) / G(0) on the lag grid
};

struct ModelCurves {
    CovarianceModel model;
    std::vector<double> true_correlation;
    std::vector<ReplicateCurve> replicates;
};

struct LagSummary {
    double lag = 0.0;
    double truth = 0.0;
    double min = 0.0;
    double q25 = 0.0;
    double median = 0.0;
    double q75 = 0.0;
    double max = 0.0;
};

/// Seed of model block k: seed XOR (k << 32); replicate m then uses that XOR m.
std::uint64_t block_seed(std::uint64_t seed, std::uint64_t block);

std::vector<double> fitted_correlation(const SsrfParams& params, int d, const std::vector<double>& lags,
                                       const QuadratureConfig& q = {});

std::vector<ModelCurves> run_covariance_experiment(const CovExperimentConfig& config);
std::vector<LagSummary> summarize_curves(const ModelCurves& curves, const std::vector<double>& lags);
/// Mean over successful replicates and lags of |fitted - true| correlation.
double mean_abs_curve_error(const ModelCurves& curves);

std::string curves_csv(const ModelCurves& curves, const std::vector<double>& lags);
std::string summary_csv(const std::vector<LagSummary>& summary);

// ---------------------------------------------------------------------------
// Kriging cross-validation

struct CrossValConfig {
    std::size_t n_train = 100;
    std::size_t n_validation = 10;
    Box domain = Box::cube(2, 0.0, 100.0);
    double mean = 70.0;
    CovarianceModel model;  // default set in the constructor
    int replicates = 50;
    std::uint64_t layout_seed = 4;
    std::uint64_t seed = 2024;
    KernelSpec kernel{KernelFamily::triangular};
    FitConfig fit;
    QuadratureConfig quadrature;
    /// Validation points with no training point closer than this are "isolated";
    /// non-positive means 3 * model range.
    double isolation_radius = 0.0;
    int jobs = 1;

    CrossValConfig();
};

struct CrossValOutcome {
    Eigen::MatrixXd train_locations;
    Eigen::MatrixXd validation_locations;
    std::vector<bool> isolated;
    std::vector<double> nearest_training_distance;
    CrossValReport report;
    std::vector<FitResult> fits;
    std::size_t failed_fits = 0;
};

/// Fixed layout of n_train + n_validation uniform points drawn from Rng(layout_seed);
/// the first n_train rows form the training set.
Eigen::MatrixXd crossval_layout(const CrossValConfig& config);

CrossValOutcome run_crossval(const CrossValConfig& config);
std::string crossval_csv(const CrossValOutcome& outcome);

// ---------------------------------------------------------------------------
// Monte Carlo bias and variance of the sample constraints

struct McBiasConfig {
    std::vector<std::size_t> sizes{100, 200, 400};
    Box domain = Box::cube(2, 0.0, 5.0);
    CovarianceModel model;
    int replicates = 100;
    std::uint64_t seed = 11;
    KernelSpec kernel{KernelFamily::triangular};
    ConstraintOptions constraints;
    int jobs = 1;
};

struct McBiasRow {
    std::size_t n = 0;
    std::size_t used = 0;
    double mean_a = 0.0;
    double mean_h1 = 0.0;
    double mean_h2 = 0.0;
    double mean_phi1 = 0.0;
    double var_phi1 = 0.0;
    double mean_target1 = 0.0;  // d F(a1) of the generating model
    double rel_bias_phi1 = 0.0; // mean of (phi1_bar - target1) / target1
    double mean_phi2 = 0.0;
    double var_phi2 = 0.0;
    double mean_target2 = 0.0;  // (c2 F(a) - c3 F(sqrt2 a) - c1 F(2a)) / 2
    double rel_bias_phi2 = 0.0;
    double psi1 = 0.0;
    double psi2 = 0.0;
};

std::vector<McBiasRow> run_mc_bias(const McBiasConfig& config);
std::string mc_bias_csv(const std::vector<McBiasRow>& rows);

}  // namespace ssrf
