#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ssrf/sample_constraints.hpp"
#include "ssrf/simulate.hpp"

namespace ssrf {

struct KrigingWeights {
    Eigen::VectorXd weights;
    double lagrange = 0.0;
};

/// Ordinary kriging on a fixed training layout. The augmented system
/// [C 1; 1^T 0] is factorized once with full-pivot LU (it is indefinite).
class OrdinaryKriging {
public:
    /// Throws NumericError naming duplicate training locations if the system is singular.
    OrdinaryKriging(const Eigen::MatrixXd& train_locations, const CovarianceFunction& cov);

    [[nodiscard]] KrigingWeights weights(const Eigen::RowVectorXd& target) const;
    [[nodiscard]] double predict(const Eigen::VectorXd& train_values, const Eigen::RowVectorXd& target) const;
    [[nodiscard]] Eigen::VectorXd predict(const Eigen::VectorXd& train_values, const Eigen::MatrixXd& targets) const;

private:
    Eigen::MatrixXd train_;
    CovarianceFunction cov_;
    Eigen::FullPivLU<Eigen::MatrixXd> lu_;
};

KrigingWeights kriging_weights(const Eigen::MatrixXd& train_locations, const Eigen::RowVectorXd& target,
                               const CovarianceFunction& cov);

Eigen::VectorXd predict(const SampleData& train, const Eigen::MatrixXd& targets, const CovarianceFunction& cov);

/// One replicate of a cross-validation run on a fixed train/validation layout.
struct CrossValReplicate {
    Eigen::VectorXd train_values;
    Eigen::VectorXd validation_values;
    CovarianceFunction cov_ssrf;
    CovarianceFunction cov_true;
};

struct CrossValPoint {
    double mre_true = 0.0;
    double mre_ssrf = 0.0;
    double mare_true = 0.0;
    double mare_ssrf = 0.0;
    std::size_t used = 0;      // replicates entering the averages
    std::size_t excluded = 0;  // replicates with a zero validation value
};

struct CrossValReport {
    std::vector<CrossValPoint> points;
    std::size_t replicates = 0;
    std::size_t excluded = 0;
};

/// Relative errors (prediction - truth) / truth per replicate and validation point,
/// averaged over replicates (MRE) and in absolute value (MARE).
CrossValReport cross_validate(const Eigen::MatrixXd& train_locations, const Eigen::MatrixXd& validation_locations,
                              std::span<const CrossValReplicate> replicates);

}  // namespace ssrf
