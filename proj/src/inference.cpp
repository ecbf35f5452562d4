#include "ssrf/inference.hpp"

#include <cmath>
#include <numbers>

#include "ssrf/errors.hpp"
#include "ssrf/nelder_mead.hpp"
#include "ssrf/rng.hpp"

namespace ssrf {

namespace {

double signed_root(double z, double beta) {
    if (beta == 1.0) {
        return z;
    }
    return std::copysign(std::pow(std::abs(z), 1.0 / beta), z);
}

ObjectiveTerms penalty(double violation) {
    ObjectiveTerms t;
    t.phi = kPenaltyScale * (1.0 + std::abs(violation));
    t.z = {0.0, 0.0, 0.0};
    t.penalized = true;
    return t;
}

ThetaPrime decode(const Eigen::VectorXd& x, double frozen_kc) {
    ThetaPrime t;
    t.eta1 = x(0);
    t.xi = std::exp(x(1));
    t.kc = x.size() > 2 ? std::exp(x(2)) : frozen_kc;
    return t;
}

Eigen::VectorXd encode(const ThetaPrime& t, bool freeze_kc) {
    Eigen::VectorXd x(freeze_kc ? 2 : 3);
    x(0) = t.eta1;
    x(1) = std::log(t.xi);
    if (!freeze_kc) {
        x(2) = std::log(t.kc);
    }
    return x;
}

}  // namespace

void FitConfig::validate() const {
    if (!(beta > 0.0)) {
        throw ArgumentError("beta must be positive");
    }
    if (max_iterations < 100) {
        throw ArgumentError("max_iterations must be >= 100");
    }
    if (!(simplex_tolerance > 0.0)) {
        throw ArgumentError("simplex_tolerance must be positive");
    }
    if (restarts < 0) {
        throw ArgumentError("restarts must be >= 0");
    }
}

ObjectiveTerms objective_terms(const ThetaPrime& theta, const ConstraintEstimates& c, double beta,
                               const QuadratureConfig& q, double eta1_lower_bound) {
    if (!(beta > 0.0)) {
        throw ArgumentError("beta must be positive");
    }
    if (!(theta.eta1 >= eta1_lower_bound)) {
        return penalty(eta1_lower_bound - theta.eta1);
    }
    const SsrfParams p{1.0, theta.eta1, theta.xi, theta.kc};
    EnsembleConstraints e;
    try {
        e = ensemble_constraints(p, c.a1, c.dimension, q);
    } catch (const PermissibilityError& err) {
        return penalty(err.violation());
    } catch (const NumericError&) {
        return penalty(0.0);
    }
    // f_bar carries a factor 1/2 relative to the stencil sums.
    const double es1 = 0.5 * e.gradient.s;
    const double es2 = 0.5 * e.curvature.s;

    ObjectiveTerms t;
    t.z[0] = e.s0prime;
    t.z[1] = (c.s0_bar / c.s1_bar) * (es1 / e.s0);
    t.z[2] = (c.s1_bar / c.s2_bar) * (es2 / es1);
    for (double z : t.z) {
        if (!std::isfinite(z)) {
            return penalty(0.0);
        }
        const double r = 1.0 - signed_root(z, beta);
        t.phi += r * r;
    }
    return t;
}

double objective_phi(const ThetaPrime& theta, const ConstraintEstimates& c, double beta,
                     const QuadratureConfig& q, double eta1_lower_bound) {
    return objective_terms(theta, c, beta, q, eta1_lower_bound).phi;
}

InitialGuess initial_guess(const ConstraintEstimates& c) {
    if (!(c.a1 > 0.0)) {
        throw ArgumentError("initial guess needs a positive step a1");
    }
    InitialGuess g;
    g.theta.eta1 = 1.0;
    g.theta.kc = 2.0 * std::numbers::pi / c.a1;
    if (c.s2_bar > 0.0 && c.s1_bar > 0.0) {
        g.theta.xi = std::sqrt(c.s1_bar / c.s2_bar);
    } else {
        g.theta.xi = c.a1;
        g.xi_fallback = true;
    }
    return g;
}

FitResult fit_constraints(const ConstraintEstimates& c, const FitConfig& config, const QuadratureConfig& q) {
    config.validate();
    q.validate();
    if (!(c.s0_bar > 0.0) || !(c.phi1_bar > 0.0)) {
        throw DegenerateDataError("constant field: sample variance or gradient constraint is zero");
    }

    FitResult out;
    out.constraints_used = c;
    const InitialGuess guess = initial_guess(c);
    if (guess.xi_fallback) {
        out.warnings.push_back("curvature constraint is not positive; initial xi set to the step a1");
    }
    const double frozen_kc = guess.theta.kc;

    auto objective = [&](const Eigen::VectorXd& x) {
        return objective_phi(decode(x, frozen_kc), c, config.beta, q, config.eta1_lower_bound);
    };

    NelderMeadOptions nm;
    nm.max_iterations = config.max_iterations;
    nm.tolerance = config.simplex_tolerance;
    nm.initial_step = config.freeze_kc ? std::vector<double>{0.5, 0.3} : std::vector<double>{0.5, 0.3, 0.3};
    nm.restarts = 1;

    std::vector<ThetaPrime> starts{guess.theta};
    Rng rng(config.seed);
    static constexpr double kEta1Starts[] = {-1.0, 1.0, 2.0};
    for (int r = 0; r < config.restarts; ++r) {
        ThetaPrime t = guess.theta;
        t.eta1 = kEta1Starts[r % 3];
        t.xi *= rng.uniform(0.5, 1.5);
        if (!config.freeze_kc) {
            t.kc *= rng.uniform(0.5, 1.5);
        }
        starts.push_back(t);
    }

    std::size_t best = 0;
    std::vector<double> best_trace;
    for (std::size_t k = 0; k < starts.size(); ++k) {
        const NelderMeadResult r = nelder_mead(objective, encode(starts[k], config.freeze_kc), nm);
        LocalSolution sol;
        sol.start = starts[k];
        sol.theta = decode(r.x, frozen_kc);
        sol.phi = r.f;
        sol.iterations = r.iterations;
        sol.converged = r.converged;
        out.local_solutions.push_back(sol);
        if (k == 0 || r.f < out.local_solutions[best].phi) {
            best = k;
            best_trace = r.trace;
        }
    }

    const LocalSolution& win = out.local_solutions[best];
    out.params.eta1 = win.theta.eta1;
    out.params.xi = win.theta.xi;
    out.params.kc = win.theta.kc;
    out.params.eta0 = eta0_from_variance(c.s0_bar, c.dimension);
    out.phi_value = win.phi;
    out.iterations = win.iterations;
    out.converged = win.converged;
    out.trace = std::move(best_trace);
    const ObjectiveTerms terms = objective_terms(win.theta, c, config.beta, q, config.eta1_lower_bound);
    out.z_values = terms.z;

    if (terms.penalized) {
        out.warnings.push_back("no permissible parameter vector found");
    }
    if (!out.converged) {
        out.warnings.push_back("simplex did not converge within max_iterations");
    }
    if (out.params.eta1 < 0.0) {
        out.warnings.push_back("negative eta1 solution");
    }
    return out;
}

FitResult fit_ssrf(const SampleData& data, const KernelSpec& spec, const FitConfig& config,
                   const QuadratureConfig& q) {
    config.validate();
    const ConstraintEstimates c = estimate_all(data, spec, config.constraints);
    return fit_constraints(c, config, q);
}

}  // namespace ssrf
