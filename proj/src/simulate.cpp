#include "ssrf/simulate.hpp"

#include <cmath>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

#include "ssrf/errors.hpp"

namespace ssrf {

std::string_view CovarianceModel::name() const noexcept {
    switch (family) {
        case ModelFamily::spherical: return "spherical";
        case ModelFamily::exponential: return "exponential";
        case ModelFamily::gaussian: return "gaussian";
        case ModelFamily::ssrf: return "ssrf";
    }
    return "unknown";
}

ModelFamily CovarianceModel::family_from_name(std::string_view name) {
    if (name == "spherical") return ModelFamily::spherical;
    if (name == "exponential") return ModelFamily::exponential;
    if (name == "gaussian") return ModelFamily::gaussian;
    if (name == "ssrf") return ModelFamily::ssrf;
    throw ArgumentError("unknown covariance model '" + std::string(name) +
                        "' (expected spherical | exponential | gaussian | ssrf)");
}

double CovarianceModel::variance() const {
    if (family == ModelFamily::ssrf) {
        return variance_constraint(ssrf, dimension, quadrature);
    }
    return sigma2;
}

void CovarianceModel::validate() const {
    if (dimension < 1) {
        throw ArgumentError("covariance model dimension must be >= 1");
    }
    if (family == ModelFamily::ssrf) {
        require_permissible(ssrf);
        return;
    }
    if (!(sigma2 > 0.0)) {
        throw ArgumentError("covariance model variance must be positive");
    }
    if (!(range > 0.0)) {
        throw ArgumentError("covariance model range must be positive");
    }
    if (family == ModelFamily::spherical && dimension > 3) {
        throw ArgumentError("spherical covariance is only valid for d <= 3");
    }
}

double model_covariance(const CovarianceModel& model, double r) {
    if (!(r >= 0.0)) {
        throw ArgumentError("covariance lag must be nonnegative");
    }
    switch (model.family) {
        case ModelFamily::spherical: {
            const double t = r / model.range;
            return t >= 1.0 ? 0.0 : model.sigma2 * (1.0 - 1.5 * t + 0.5 * t * t * t);
        }
        case ModelFamily::exponential: return model.sigma2 * std::exp(-r / model.range);
        case ModelFamily::gaussian: {
            const double t = r / model.range;
            return model.sigma2 * std::exp(-t * t);
        }
        case ModelFamily::ssrf: return covariance(model.ssrf, r, model.dimension, model.quadrature);
    }
    return 0.0;
}

CovarianceFunction make_covariance_function(const CovarianceModel& model, double max_lag, int nodes) {
    model.validate();
    if (model.family != ModelFamily::ssrf) {
        return [model](double r) { return model_covariance(model, r); };
    }
    if (!(max_lag > 0.0) || nodes < 4) {
        throw ArgumentError("tabulated covariance needs max_lag > 0 and at least 4 nodes");
    }
    const double step = max_lag / (nodes - 1);
    std::vector<double> table(static_cast<std::size_t>(nodes));
    for (int k = 0; k < nodes; ++k) {
        table[static_cast<std::size_t>(k)] = model_covariance(model, k * step);
    }
    const double g0 = table.front();
    // The band-limited covariance is smooth and even, so G'(0) = 0.
    auto spline = std::make_shared<boost::math::interpolators::cardinal_cubic_b_spline<double>>(
        table.begin(), table.end(), 0.0, step, 0.0);
    return [spline, g0, max_lag, model](double r) {
        if (r == 0.0) {
            return g0;
        }
        if (r > max_lag) {
            return model_covariance(model, r);
        }
        return (*spline)(r);
    };
}

void Box::validate() const {
    if (lower.size() < 1 || lower.size() != upper.size()) {
        throw ArgumentError("box bounds must have equal positive length");
    }
    for (Eigen::Index k = 0; k < lower.size(); ++k) {
        if (!(upper(k) > lower(k))) {
            throw ArgumentError("box must have positive volume");
        }
    }
}

Box Box::cube(int d, double lo, double hi) {
    Box b;
    b.lower = Eigen::VectorXd::Constant(d, lo);
    b.upper = Eigen::VectorXd::Constant(d, hi);
    return b;
}

void SimulationPlan::validate() const {
    if (n < 2) {
        throw ArgumentError("simulation needs n >= 2");
    }
    if (replicates < 1) {
        throw ArgumentError("simulation needs at least one replicate");
    }
    domain.validate();
    if (model.dimension != domain.dimension()) {
        throw ArgumentError("covariance model dimension differs from the domain dimension");
    }
    model.validate();
}

Eigen::MatrixXd sample_locations(std::size_t n, const Box& box, Rng& rng) {
    box.validate();
    const int d = box.dimension();
    Eigen::MatrixXd x(static_cast<Eigen::Index>(n), d);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (int k = 0; k < d; ++k) {
            x(i, k) = rng.uniform(box.lower(k), box.upper(k));
        }
    }
    return x;
}

Eigen::MatrixXd sample_locations(const SimulationPlan& plan, Rng& rng) {
    return sample_locations(plan.n, plan.domain, rng);
}

Eigen::MatrixXd covariance_matrix(const Eigen::MatrixXd& locations, const CovarianceFunction& cov) {
    const Eigen::Index n = locations.rows();
    Eigen::MatrixXd c(n, n);
    const double c0 = cov(0.0);
    for (Eigen::Index i = 0; i < n; ++i) {
        c(i, i) = c0;
        for (Eigen::Index j = 0; j < i; ++j) {
            const double v = cov((locations.row(i) - locations.row(j)).norm());
            c(i, j) = v;
            c(j, i) = v;
        }
    }
    return c;
}

Eigen::MatrixXd covariance_matrix(const Eigen::MatrixXd& locations, const CovarianceModel& model) {
    double reach = 0.0;
    if (locations.rows() > 0) {
        const Eigen::RowVectorXd span = locations.colwise().maxCoeff() - locations.colwise().minCoeff();
        reach = span.norm();
    }
    return covariance_matrix(locations, make_covariance_function(model, std::max(reach, 1e-12)));
}

Eigen::MatrixXd cholesky(const Eigen::MatrixXd& c) {
    const Eigen::Index n = c.rows();
    if (c.cols() != n) {
        throw ArgumentError("cholesky needs a square matrix");
    }
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        double diag = c(j, j);
        for (Eigen::Index k = 0; k < j; ++k) {
            diag -= l(j, k) * l(j, k);
        }
        if (!(diag > 0.0)) {
            std::ostringstream os;
            os << "matrix is not positive definite: pivot " << j << " is " << diag;
            throw NumericError(os.str(), diag, static_cast<long>(j));
        }
        const double root = std::sqrt(diag);
        l(j, j) = root;
        for (Eigen::Index i = j + 1; i < n; ++i) {
            double v = c(i, j);
            for (Eigen::Index k = 0; k < j; ++k) {
                v -= l(i, k) * l(j, k);
            }
            l(i, j) = v / root;
        }
    }
    return l;
}

Eigen::MatrixXd factor_covariance(const Eigen::MatrixXd& c) {
    try {
        return cholesky(c);
    } catch (const NumericError&) {
        Eigen::MatrixXd jittered = c;
        const double scale = c.rows() > 0 ? c(0, 0) : 1.0;
        jittered.diagonal().array() += 1e-10 * scale;
        return cholesky(jittered);
    }
}

Eigen::VectorXd gaussian_field_from_factor(const Eigen::MatrixXd& factor, double mean, Rng& rng) {
    Eigen::VectorXd z(factor.rows());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        z(i) = rng.normal();
    }
    Eigen::VectorXd x = factor.triangularView<Eigen::Lower>() * z;
    x.array() += mean;
    return x;
}

Eigen::VectorXd gaussian_field(const Eigen::MatrixXd& locations, const CovarianceModel& model, double mean,
                               Rng& rng) {
    return gaussian_field_from_factor(factor_covariance(covariance_matrix(locations, model)), mean, rng);
}

Realization simulate_replicate(const SimulationPlan& plan, std::uint64_t m) {
    plan.validate();
    Rng rng(replicate_seed(plan.seed, m));
    Realization r;
    r.locations = sample_locations(plan, rng);
    r.values = gaussian_field(r.locations, plan.model, plan.mean, rng);
    return r;
}

}  // namespace ssrf
