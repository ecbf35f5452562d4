#include "ssrf/kriging.hpp"

#include <cmath>
#include <sstream>

#include "ssrf/errors.hpp"

namespace ssrf {

namespace {

void require_distinct(const Eigen::MatrixXd& x) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index j = 0; j < i; ++j) {
            if ((x.row(i) - x.row(j)).squaredNorm() == 0.0) {
                std::ostringstream os;
                os << "singular kriging system: training locations " << j << " and " << i << " coincide";
                throw NumericError(os.str(), 0.0, static_cast<long>(i));
            }
        }
    }
}

}  // namespace

OrdinaryKriging::OrdinaryKriging(const Eigen::MatrixXd& train_locations, const CovarianceFunction& cov)
    : train_(train_locations), cov_(cov) {
    const Eigen::Index n = train_.rows();
    if (n < 1) {
        throw ArgumentError("kriging needs at least one training point");
    }
    require_distinct(train_);
    Eigen::MatrixXd a(n + 1, n + 1);
    a.topLeftCorner(n, n) = covariance_matrix(train_, cov_);
    a.col(n).head(n).setOnes();
    a.row(n).head(n).setOnes();
    a(n, n) = 0.0;
    lu_.compute(a);
    if (!lu_.isInvertible()) {
        throw NumericError("singular kriging system");
    }
}

KrigingWeights OrdinaryKriging::weights(const Eigen::RowVectorXd& target) const {
    const Eigen::Index n = train_.rows();
    if (target.size() != train_.cols()) {
        throw ArgumentError("target dimension differs from the training locations");
    }
    Eigen::VectorXd rhs(n + 1);
    for (Eigen::Index i = 0; i < n; ++i) {
        rhs(i) = cov_((train_.row(i) - target).norm());
    }
    rhs(n) = 1.0;
    const Eigen::VectorXd sol = lu_.solve(rhs);
    KrigingWeights w;
    w.weights = sol.head(n);
    w.lagrange = sol(n);
    return w;
}

double OrdinaryKriging::predict(const Eigen::VectorXd& train_values, const Eigen::RowVectorXd& target) const {
    if (train_values.size() != train_.rows()) {
        throw ArgumentError("training values differ in length from the training locations");
    }
    return weights(target).weights.dot(train_values);
}

Eigen::VectorXd OrdinaryKriging::predict(const Eigen::VectorXd& train_values, const Eigen::MatrixXd& targets) const {
    Eigen::VectorXd out(targets.rows());
    for (Eigen::Index t = 0; t < targets.rows(); ++t) {
        out(t) = predict(train_values, Eigen::RowVectorXd(targets.row(t)));
    }
    return out;
}

KrigingWeights kriging_weights(const Eigen::MatrixXd& train_locations, const Eigen::RowVectorXd& target,
                               const CovarianceFunction& cov) {
    return OrdinaryKriging(train_locations, cov).weights(target);
}

Eigen::VectorXd predict(const SampleData& train, const Eigen::MatrixXd& targets, const CovarianceFunction& cov) {
    if (train.values.size() != train.locations.rows()) {
        throw ArgumentError("locations and values differ in length");
    }
    return OrdinaryKriging(train.locations, cov).predict(train.values, targets);
}

CrossValReport cross_validate(const Eigen::MatrixXd& train_locations, const Eigen::MatrixXd& validation_locations,
                              std::span<const CrossValReplicate> replicates) {
    const Eigen::Index nv = validation_locations.rows();
    CrossValReport report;
    report.replicates = replicates.size();
    report.points.resize(static_cast<std::size_t>(nv));
    for (const CrossValReplicate& rep : replicates) {
        if (rep.validation_values.size() != nv) {
            throw ArgumentError("validation values differ in length from the validation locations");
        }
        const Eigen::VectorXd p_true =
            OrdinaryKriging(train_locations, rep.cov_true).predict(rep.train_values, validation_locations);
        const Eigen::VectorXd p_ssrf =
            OrdinaryKriging(train_locations, rep.cov_ssrf).predict(rep.train_values, validation_locations);
        for (Eigen::Index j = 0; j < nv; ++j) {
            CrossValPoint& pt = report.points[static_cast<std::size_t>(j)];
            const double truth = rep.validation_values(j);
            if (truth == 0.0) {
                ++pt.excluded;
                ++report.excluded;
                continue;
            }
            const double e_true = (p_true(j) - truth) / truth;
            const double e_ssrf = (p_ssrf(j) - truth) / truth;
            pt.mre_true += e_true;
            pt.mre_ssrf += e_ssrf;
            pt.mare_true += std::abs(e_true);
            pt.mare_ssrf += std::abs(e_ssrf);
            ++pt.used;
        }
    }
    for (CrossValPoint& pt : report.points) {
        if (pt.used > 0) {
            const double m = static_cast<double>(pt.used);
            pt.mre_true /= m;
            pt.mre_ssrf /= m;
            pt.mare_true /= m;
            pt.mare_ssrf /= m;
        }
    }
    return report;
}

}  // namespace ssrf
