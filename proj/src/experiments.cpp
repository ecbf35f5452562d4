#include "ssrf/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "ssrf/coefficients.hpp"
#include "ssrf/errors.hpp"
#include "ssrf/io.hpp"
#include "ssrf/rng.hpp"

namespace ssrf {

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& body) {
    const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(jobs, 1)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            body(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex guard;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(guard);
                    if (!failure) {
                        failure = std::current_exception();
                    }
                }
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

std::vector<double> lag_grid(double max_lag, int intervals) {
    if (!(max_lag > 0.0) || intervals < 1) {
        throw ArgumentError("lag grid needs max_lag > 0 and at least one interval");
    }
    std::vector<double> lags(static_cast<std::size_t>(intervals) + 1);
    for (int k = 0; k <= intervals; ++k) {
        lags[static_cast<std::size_t>(k)] = max_lag * k / intervals;
    }
    return lags;
}

std::vector<BiasTableRow> bias_table(const std::vector<KernelSpec>& kernels, int d) {
    std::vector<BiasTableRow> rows;
    for (const auto& k : kernels) {
        BiasTableRow r;
        r.kernel = std::string(k.name());
        r.constants = bias_constants(k, d);
        r.reference_mismatch = k.family == KernelFamily::triangular;
        rows.push_back(r);
    }
    return rows;
}

std::string bias_table_csv(const std::vector<BiasTableRow>& rows) {
    std::ostringstream os;
    os << "kernel,B1_2,B2,psi1,B1_4,B4,psi2,reference_mismatch\n";
    for (const auto& r : rows) {
        const auto& c = r.constants;
        os << r.kernel << ',' << csv_row({c.b1_2, c.b2, c.psi1, c.b1_4, c.b4, c.psi2}) << ','
           << (r.reference_mismatch ? 1 : 0) << '\n';
    }
    return os.str();
}

std::uint64_t block_seed(std::uint64_t seed, std::uint64_t block) { return seed ^ (block << 32); }

std::vector<double> fitted_correlation(const SsrfParams& params, int d, const std::vector<double>& lags,
                                       const QuadratureConfig& q) {
    const double g0 = covariance(params, 0.0, d, q);
    std::vector<double> out;
    out.reserve(lags.size());
    for (double r : lags) {
        out.push_back(r == 0.0 ? 1.0 : covariance(params, r, d, q) / g0);
    }
    return out;
}

std::vector<ModelCurves> run_covariance_experiment(const CovExperimentConfig& config) {
    if (config.models.empty()) {
        throw ArgumentError("covariance experiment needs at least one model block");
    }
    if (config.replicates < 1) {
        throw ArgumentError("covariance experiment needs at least one replicate");
    }
    const int d = config.domain.dimension();
    std::vector<ModelCurves> out;
    for (std::size_t k = 0; k < config.models.size(); ++k) {
        ModelCurves curves;
        curves.model = config.models[k];
        curves.model.dimension = d;
        const double var = curves.model.variance();
        for (double r : config.lags) {
            curves.true_correlation.push_back(model_covariance(curves.model, r) / var);
        }

        SimulationPlan plan;
        plan.n = config.n;
        plan.domain = config.domain;
        plan.model = curves.model;
        plan.mean = config.mean;
        plan.replicates = config.replicates;
        plan.seed = block_seed(config.seed, k);
        plan.validate();

        curves.replicates.resize(static_cast<std::size_t>(config.replicates));
        parallel_for(curves.replicates.size(), config.jobs, [&](std::size_t m) {
            ReplicateCurve& rc = curves.replicates[m];
            try {
                const Realization real = simulate_replicate(plan, m);
                const SampleData data{real.locations, real.values};
                FitConfig fit = config.fit;
                fit.seed = replicate_seed(plan.seed, m);
                rc.fit = fit_ssrf(data, config.kernel, fit, config.quadrature);
                rc.correlation = fitted_correlation(rc.fit.params, d, config.lags, config.quadrature);
                rc.ok = true;
            } catch (const Error& e) {
                rc.ok = false;
                rc.error = e.what();
            }
        });
        out.push_back(std::move(curves));
    }
    return out;
}

namespace {

// Linear-interpolation quantile of sorted data (type 7).
double quantile(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) {
        return std::nan("");
    }
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

std::vector<LagSummary> summarize_curves(const ModelCurves& curves, const std::vector<double>& lags) {
    std::vector<LagSummary> out;
    for (std::size_t l = 0; l < lags.size(); ++l) {
        std::vector<double> v;
        for (const auto& r : curves.replicates) {
            if (r.ok) {
                v.push_back(r.correlation[l]);
            }
        }
        std::sort(v.begin(), v.end());
        LagSummary s;
        s.lag = lags[l];
        s.truth = curves.true_correlation[l];
        s.min = quantile(v, 0.0);
        s.q25 = quantile(v, 0.25);
        s.median = quantile(v, 0.5);
        s.q75 = quantile(v, 0.75);
        s.max = quantile(v, 1.0);
        out.push_back(s);
    }
    return out;
}

double mean_abs_curve_error(const ModelCurves& curves) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& r : curves.replicates) {
        if (!r.ok) {
            continue;
        }
        for (std::size_t l = 0; l < r.correlation.size(); ++l) {
            sum += std::abs(r.correlation[l] - curves.true_correlation[l]);
            ++count;
        }
    }
    return count ? sum / static_cast<double>(count) : std::nan("");
}

std::string curves_csv(const ModelCurves& curves, const std::vector<double>& lags) {
    std::ostringstream os;
    os << "replicate,status,eta0,eta1,xi,kc,phi";
    for (std::size_t l = 0; l < lags.size(); ++l) {
        os << ",r" << format_number(lags[l]);
    }
    os << '\n';
    os << "true,ok,,,,,";
    for (double c : curves.true_correlation) {
        os << ',' << format_number(c);
    }
    os << '\n';
    for (std::size_t m = 0; m < curves.replicates.size(); ++m) {
        const auto& r = curves.replicates[m];
        os << m << ',' << (r.ok ? "ok" : "failed");
        if (r.ok) {
            const auto& p = r.fit.params;
            os << ',' << csv_row({p.eta0, p.eta1, p.xi, p.kc, r.fit.phi_value});
            for (double c : r.correlation) {
                os << ',' << format_number(c);
            }
        }
        os << '\n';
    }
    return os.str();
}

std::string summary_csv(const std::vector<LagSummary>& summary) {
    std::ostringstream os;
    os << "lag,true,min,q25,median,q75,max\n";
    for (const auto& s : summary) {
        os << csv_row({s.lag, s.truth, s.min, s.q25, s.median, s.q75, s.max}) << '\n';
    }
    return os.str();
}

CrossValConfig::CrossValConfig() {
    model.family = ModelFamily::exponential;
    model.sigma2 = 100.0;
    model.range = 4.0;
    model.dimension = 2;
}

Eigen::MatrixXd crossval_layout(const CrossValConfig& config) {
    if (config.n_train < 2 || config.n_validation < 1) {
        throw ArgumentError("cross-validation needs n_train >= 2 and n_validation >= 1");
    }
    Rng rng(config.layout_seed);
    return sample_locations(config.n_train + config.n_validation, config.domain, rng);
}

CrossValOutcome run_crossval(const CrossValConfig& config) {
    if (config.replicates < 1) {
        throw ArgumentError("cross-validation needs at least one replicate");
    }
    CovarianceModel truth = config.model;
    truth.dimension = config.domain.dimension();
    truth.validate();
    const int d = truth.dimension;

    const Eigen::MatrixXd all = crossval_layout(config);
    const auto nt = static_cast<Eigen::Index>(config.n_train);
    const auto nv = static_cast<Eigen::Index>(config.n_validation);
    CrossValOutcome out;
    out.train_locations = all.topRows(nt);
    out.validation_locations = all.bottomRows(nv);

    const double radius =
        config.isolation_radius > 0.0 ? config.isolation_radius : 3.0 * truth.range;
    for (Eigen::Index j = 0; j < nv; ++j) {
        double nearest = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < nt; ++i) {
            nearest = std::min(nearest, (out.train_locations.row(i) - out.validation_locations.row(j)).norm());
        }
        out.nearest_training_distance.push_back(nearest);
        out.isolated.push_back(nearest > radius);
    }

    const Eigen::MatrixXd factor = factor_covariance(covariance_matrix(all, truth));
    const CovarianceFunction cov_true = make_covariance_function(truth, 1.0);
    const Eigen::RowVectorXd extent = config.domain.upper - config.domain.lower;
    const double max_lag = extent.norm();

    std::vector<CrossValReplicate> reps(static_cast<std::size_t>(config.replicates));
    std::vector<bool> ok(reps.size(), false);
    out.fits.resize(reps.size());
    parallel_for(reps.size(), config.jobs, [&](std::size_t m) {
        Rng rng(replicate_seed(config.seed, m));
        const Eigen::VectorXd values = gaussian_field_from_factor(factor, config.mean, rng);
        CrossValReplicate& rep = reps[m];
        rep.train_values = values.head(nt);
        rep.validation_values = values.tail(nv);
        rep.cov_true = cov_true;
        try {
            FitConfig fit = config.fit;
            fit.seed = replicate_seed(config.seed, m);
            out.fits[m] = fit_ssrf(SampleData{out.train_locations, rep.train_values}, config.kernel, fit,
                                   config.quadrature);
            CovarianceModel fitted;
            fitted.family = ModelFamily::ssrf;
            fitted.ssrf = out.fits[m].params;
            fitted.dimension = d;
            fitted.quadrature = config.quadrature;
            rep.cov_ssrf = make_covariance_function(fitted, max_lag);
            ok[m] = true;
        } catch (const Error&) {
            ok[m] = false;
        }
    });

    std::vector<CrossValReplicate> used;
    for (std::size_t m = 0; m < reps.size(); ++m) {
        if (ok[m]) {
            used.push_back(std::move(reps[m]));
        } else {
            ++out.failed_fits;
        }
    }
    out.report = cross_validate(out.train_locations, out.validation_locations, used);
    return out;
}

std::string crossval_csv(const CrossValOutcome& outcome) {
    std::ostringstream os;
    os << "point";
    for (Eigen::Index k = 0; k < outcome.validation_locations.cols(); ++k) {
        os << ",x" << k + 1;
    }
    os << ",nearest_training,isolated,MRE_true,MRE_ssrf,MARE_true,MARE_ssrf,replicates\n";
    for (std::size_t j = 0; j < outcome.report.points.size(); ++j) {
        const auto& p = outcome.report.points[j];
        const auto row = static_cast<Eigen::Index>(j);
        os << j + 1;
        for (Eigen::Index k = 0; k < outcome.validation_locations.cols(); ++k) {
            os << ',' << format_number(outcome.validation_locations(row, k));
        }
        os << ',' << format_number(outcome.nearest_training_distance[j]) << ',' << (outcome.isolated[j] ? 1 : 0)
           << ',' << csv_row({p.mre_true, p.mre_ssrf, p.mare_true, p.mare_ssrf}) << ',' << p.used << '\n';
    }
    return os.str();
}

std::vector<McBiasRow> run_mc_bias(const McBiasConfig& config) {
    if (config.replicates < 2) {
        throw ArgumentError("mc-bias needs at least two replicates");
    }
    CovarianceModel model = config.model;
    model.dimension = config.domain.dimension();
    model.validate();
    const int d = model.dimension;
    const auto c = stencil_coefficients(d);
    const double var = model.variance();
    auto semivariogram_true = [&](double r) { return var - model_covariance(model, r); };

    std::vector<McBiasRow> rows;
    for (std::size_t k = 0; k < config.sizes.size(); ++k) {
        SimulationPlan plan;
        plan.n = config.sizes[k];
        plan.domain = config.domain;
        plan.model = model;
        plan.replicates = config.replicates;
        plan.seed = block_seed(config.seed, k);
        plan.validate();

        struct Sample {
            bool ok = false;
            ConstraintEstimates est;
            double target1 = 0.0;
            double target2 = 0.0;
        };
        std::vector<Sample> samples(static_cast<std::size_t>(config.replicates));
        parallel_for(samples.size(), config.jobs, [&](std::size_t m) {
            try {
                const Realization real = simulate_replicate(plan, m);
                Sample& s = samples[m];
                s.est = estimate_all(SampleData{real.locations, real.values}, config.kernel, config.constraints);
                const double a = s.est.a1;
                s.target1 = d * semivariogram_true(a);
                const double f2 = d > 1 ? semivariogram_true(std::sqrt(2.0) * a) : 0.0;
                s.target2 = 0.5 * (c.c2 * semivariogram_true(a) - c.c3 * f2 - c.c1 * semivariogram_true(2.0 * a));
                s.ok = true;
            } catch (const Error&) {
                samples[m].ok = false;
            }
        });

        McBiasRow row;
        row.n = plan.n;
        row.psi1 = relative_bias_gradient(config.kernel, d);
        row.psi2 = relative_bias_curvature(config.kernel, d);
        std::vector<double> p1, p2;
        for (const auto& s : samples) {
            if (!s.ok) {
                continue;
            }
            ++row.used;
            row.mean_a += s.est.a1;
            row.mean_h1 += s.est.h1;
            row.mean_h2 += s.est.h2;
            row.mean_target1 += s.target1;
            row.mean_target2 += s.target2;
            row.rel_bias_phi1 += (s.est.phi1_bar - s.target1) / s.target1;
            row.rel_bias_phi2 += (s.est.phi2_bar - s.target2) / s.target2;
            p1.push_back(s.est.phi1_bar);
            p2.push_back(s.est.phi2_bar);
        }
        if (row.used > 0) {
            const double u = static_cast<double>(row.used);
            row.mean_a /= u;
            row.mean_h1 /= u;
            row.mean_h2 /= u;
            row.mean_target1 /= u;
            row.mean_target2 /= u;
            row.rel_bias_phi1 /= u;
            row.rel_bias_phi2 /= u;
            auto moments = [u](const std::vector<double>& v, double& mean, double& variance) {
                mean = 0.0;
                for (double x : v) mean += x;
                mean /= u;
                variance = 0.0;
                for (double x : v) variance += (x - mean) * (x - mean);
                variance = v.size() > 1 ? variance / (u - 1.0) : 0.0;
            };
            moments(p1, row.mean_phi1, row.var_phi1);
            moments(p2, row.mean_phi2, row.var_phi2);
        }
        rows.push_back(row);
    }
    return rows;
}

std::string mc_bias_csv(const std::vector<McBiasRow>& rows) {
    std::ostringstream os;
    os << "n,replicates,mean_a,mean_h1,mean_h2,mean_phi1,var_phi1,mean_target1,rel_bias_phi1,psi1,"
          "mean_phi2,var_phi2,mean_target2,rel_bias_phi2,psi2\n";
    for (const auto& r : rows) {
        os << r.n << ',' << r.used << ','
           << csv_row({r.mean_a, r.mean_h1, r.mean_h2, r.mean_phi1, r.var_phi1, r.mean_target1, r.rel_bias_phi1,
                       r.psi1, r.mean_phi2, r.var_phi2, r.mean_target2, r.rel_bias_phi2, r.psi2})
           << '\n';
    }
    return os.str();
}

}  // namespace ssrf
