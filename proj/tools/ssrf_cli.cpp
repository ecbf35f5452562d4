// Command-line front end: constraint estimation, fitting, simulation and the
// desk-scale experiments. Settings come from flags, then --config JSON, then defaults.
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ssrf/errors.hpp"
#include "ssrf/experiments.hpp"
#include "ssrf/inference.hpp"
#include "ssrf/io.hpp"
#include "ssrf/sample_constraints.hpp"
#include "ssrf/simulate.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Flags shared by the subcommands. Unset optionals fall through to the config file.
struct Common {
    std::string config_path;
    std::string out;
    std::optional<std::string> kernel;
    std::optional<std::uint64_t> seed;
    std::optional<int> jobs;
    std::optional<int> replicates;
    std::optional<double> beta;
    std::optional<int> restarts;
    bool freeze_kc = false;
};

json load_config(const std::string& path) {
    if (path.empty()) {
        return json::object();
    }
    const std::string text = ssrf::read_text(path);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ssrf::ArgumentError("config '" + path + "' is not valid JSON: " + e.what());
    }
    if (!j.is_object()) {
        throw ssrf::ArgumentError("config '" + path + "' must hold a JSON object");
    }
    return j;
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key) || j[key].is_null()) {
        return fallback;
    }
    try {
        return j[key].get<T>();
    } catch (const json::exception&) {
        throw ssrf::ArgumentError(std::string("config key '") + key + "' has the wrong type");
    }
}

void apply_flags(json& cfg, const Common& c) {
    if (c.kernel) cfg["kernel"] = *c.kernel;
    if (c.seed) cfg["seed"] = *c.seed;
    if (c.jobs) cfg["jobs"] = *c.jobs;
    if (c.replicates) cfg["replicates"] = *c.replicates;
    if (!cfg.contains("fit")) cfg["fit"] = json::object();
    if (c.beta) cfg["fit"]["beta"] = *c.beta;
    if (c.restarts) cfg["fit"]["restarts"] = *c.restarts;
    if (c.freeze_kc) cfg["fit"]["freeze_kc"] = true;
}

ssrf::KernelSpec kernel_of(const json& cfg) {
    return ssrf::KernelSpec::from_name(get_or<std::string>(cfg, "kernel", "triangular"));
}

ssrf::FitConfig fit_of(const json& cfg) {
    const json f = get_or<json>(cfg, "fit", json::object());
    ssrf::FitConfig fit;
    fit.beta = get_or(f, "beta", fit.beta);
    fit.restarts = get_or(f, "restarts", fit.restarts);
    fit.freeze_kc = get_or(f, "freeze_kc", fit.freeze_kc);
    fit.max_iterations = get_or(f, "max_iterations", fit.max_iterations);
    fit.simplex_tolerance = get_or(f, "simplex_tolerance", fit.simplex_tolerance);
    fit.constraints.min_pairs = get_or<std::size_t>(f, "min_pairs", fit.constraints.min_pairs);
    fit.constraints.refine_bandwidth = get_or(f, "refine_bandwidth", fit.constraints.refine_bandwidth);
    fit.seed = get_or<std::uint64_t>(cfg, "seed", 0);
    fit.validate();
    return fit;
}

ssrf::QuadratureConfig quadrature_of(const json& cfg) {
    const json q = get_or<json>(cfg, "quadrature", json::object());
    ssrf::QuadratureConfig out;
    out.relative_tolerance = get_or(q, "relative_tolerance", out.relative_tolerance);
    out.max_subdivisions = get_or(q, "max_subdivisions", out.max_subdivisions);
    out.validate();
    return out;
}

ssrf::Box domain_of(const json& cfg, double lo, double hi) {
    const int d = get_or(cfg, "dim", 2);
    const auto range = get_or<std::vector<double>>(cfg, "domain", {lo, hi});
    if (range.size() != 2) {
        throw ssrf::ArgumentError("config 'domain' must be [lower, upper]");
    }
    ssrf::Box box = ssrf::Box::cube(d, range[0], range[1]);
    box.validate();
    return box;
}

ssrf::CovarianceModel model_of(const json& m, int d) {
    ssrf::CovarianceModel model;
    model.family = ssrf::CovarianceModel::family_from_name(get_or<std::string>(m, "family", "exponential"));
    model.sigma2 = get_or(m, "sigma2", 1.0);
    model.range = get_or(m, "range", 1.0);
    model.ssrf.eta0 = get_or(m, "eta0", 1.0);
    model.ssrf.eta1 = get_or(m, "eta1", 1.0);
    model.ssrf.xi = get_or(m, "xi", 1.0);
    model.ssrf.kc = get_or(m, "kc", 1.0);
    model.dimension = d;
    model.validate();
    return model;
}

std::vector<double> lags_of(const json& cfg) {
    const json l = get_or<json>(cfg, "lags", json::object());
    const double max_lag = get_or(l, "max", 1.2);
    const int intervals = get_or(l, "intervals", 10);
    if (!(max_lag > 0.0) || intervals < 1) {
        throw ssrf::ArgumentError("lag grid needs max > 0 and intervals >= 1");
    }
    return ssrf::lag_grid(max_lag, intervals);
}

std::uint64_t require_seed(const json& cfg) {
    if (!cfg.contains("seed")) {
        throw ssrf::ArgumentError("a seed is required (--seed or config key 'seed')");
    }
    return get_or<std::uint64_t>(cfg, "seed", 0);
}

void emit(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
    } else {
        ssrf::write_text(path, content);
    }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string replicate_name(std::size_t m) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04zu", m);
    return buf;
}

bool constant_values(const ssrf::SampleData& s) {
    return s.values.size() > 0 && (s.values.array() == s.values(0)).all();
}

int cmd_constraints(const std::string& input, const Common& c) {
    json cfg = load_config(c.config_path);
    apply_flags(cfg, c);
    const ssrf::SampleData data = ssrf::read_samples_csv(input);
    if (constant_values(data)) {
        std::cerr << "warning: value column is constant; all constraints are zero\n";
    }
    const auto est = ssrf::estimate_all(data, kernel_of(cfg), fit_of(cfg).constraints);
    emit(c.out, dump(ssrf::to_json(est)));
    return 0;
}

int cmd_fit(const std::string& input, const std::string& curve_path, const Common& c) {
    json cfg = load_config(c.config_path);
    apply_flags(cfg, c);
    const ssrf::SampleData data = ssrf::read_samples_csv(input);
    if (constant_values(data)) {
        std::cerr << "warning: value column is constant\n";
    }
    const auto q = quadrature_of(cfg);
    const ssrf::FitResult r = ssrf::fit_ssrf(data, kernel_of(cfg), fit_of(cfg), q);
    for (const auto& w : r.warnings) {
        std::cerr << "warning: " << w << '\n';
    }
    emit(c.out, dump(ssrf::to_json(r)));
    if (!curve_path.empty()) {
        const auto lags = lags_of(cfg);
        const double g0 = ssrf::covariance(r.params, 0.0, data.dimension(), q);
        std::string csv = "lag,covariance,correlation\n";
        for (double lag : lags) {
            const double g = lag == 0.0 ? g0 : ssrf::covariance(r.params, lag, data.dimension(), q);
            csv += ssrf::csv_row({lag, g, g / g0}) + '\n';
        }
        ssrf::write_text(curve_path, csv);
    }
    return 0;
}

int cmd_simulate(const Common& c) {
    json cfg = load_config(c.config_path);
    apply_flags(cfg, c);
    if (c.out.empty()) {
        throw ssrf::ArgumentError("simulate needs --out DIR");
    }
    ssrf::SimulationPlan plan;
    plan.domain = domain_of(cfg, 0.0, 5.0);
    plan.n = get_or<std::size_t>(cfg, "n", 200);
    plan.model = model_of(get_or<json>(cfg, "model", json::object()), plan.domain.dimension());
    plan.mean = get_or(cfg, "mean", 0.0);
    plan.replicates = get_or(cfg, "replicates", 1);
    plan.seed = require_seed(cfg);
    plan.validate();
    std::vector<ssrf::Realization> reps(static_cast<std::size_t>(plan.replicates));
    ssrf::parallel_for(reps.size(), get_or(cfg, "jobs", 1),
                       [&](std::size_t m) { reps[m] = ssrf::simulate_replicate(plan, m); });
    for (std::size_t m = 0; m < reps.size(); ++m) {
        ssrf::write_text((fs::path(c.out) / ("sample_" + replicate_name(m) + ".csv")).string(),
                         ssrf::samples_csv(reps[m].locations, reps[m].values));
    }
    return 0;
}

int cmd_experiment_cov(const Common& c) {
    json cfg = load_config(c.config_path);
    apply_flags(cfg, c);
    if (c.out.empty()) {
        throw ssrf::ArgumentError("experiment-cov needs --out DIR");
    }
    ssrf::CovExperimentConfig ex;
    ex.domain = domain_of(cfg, 0.0, 5.0);
    const int d = ex.domain.dimension();
    json models = get_or<json>(cfg, "models", json::array());
    if (models.empty()) {
        models = json::array({{{"family", "spherical"}, {"sigma2", 1.0}, {"range", 1.0}},
                              {{"family", "exponential"}, {"sigma2", 1.0}, {"range", 0.5}},
                              {{"family", "gaussian"}, {"sigma2", 1.0}, {"range", 1.0}}});
    }
    for (const auto& m : models) {
        ex.models.push_back(model_of(m, d));
    }
    ex.n = get_or<std::size_t>(cfg, "n", ex.n);
    ex.mean = get_or(cfg, "mean", ex.mean);
    ex.replicates = get_or(cfg, "replicates", ex.replicates);
    ex.seed = require_seed(cfg);
    ex.kernel = kernel_of(cfg);
    ex.fit = fit_of(cfg);
    ex.quadrature = quadrature_of(cfg);
    ex.lags = lags_of(cfg);
    ex.jobs = get_or(cfg, "jobs", 1);

    const auto results = ssrf::run_covariance_experiment(ex);
    std::string summary = "model,lag,true,min,q25,median,q75,max\n";
    for (const auto& curves : results) {
        const std::string name(curves.model.name());
        const fs::path dir = fs::path(c.out) / name;
        for (std::size_t m = 0; m < curves.replicates.size(); ++m) {
            const auto& rc = curves.replicates[m];
            std::string csv = "lag,fitted,true\n";
            if (rc.ok) {
                for (std::size_t l = 0; l < ex.lags.size(); ++l) {
                    csv += ssrf::csv_row({ex.lags[l], rc.correlation[l], curves.true_correlation[l]}) + '\n';
                }
            } else {
                std::cerr << "warning: " << name << " replicate " << m << " failed: " << rc.error << '\n';
            }
            ssrf::write_text((dir / ("curve_" + replicate_name(m) + ".csv")).string(), csv);
        }
        ssrf::write_text((fs::path(c.out) / (name + "_curves.csv")).string(), ssrf::curves_csv(curves, ex.lags));
        for (const auto& s : ssrf::summarize_curves(curves, ex.lags)) {
            summary += name + ',' + ssrf::csv_row({s.lag, s.truth, s.min, s.q25, s.median, s.q75, s.max}) + '\n';
        }
        std::cerr << name << ": mean |fitted - true| correlation = "
                  << ssrf::format_number(ssrf::mean_abs_curve_error(curves)) << '\n';
    }
    ssrf::write_text((fs::path(c.out) / "summary.csv").string(), summary);
    return 0;
}

int cmd_crossval(const Common& c) {
    json cfg = load_config(c.config_path);
    apply_flags(cfg, c);
    ssrf::CrossValConfig cv;
    cv.domain = domain_of(cfg, 0.0, 100.0);
    if (cfg.contains("model")) {
        cv.model = model_of(cfg["model"], cv.domain.dimension());
    }
    cv.n_train = get_or<std::size_t>(cfg, "n_train", cv.n_train);
    cv.n_validation = get_or<std::size_t>(cfg, "n_validation", cv.n_validation);
    cv.mean = get_or(cfg, "mean", cv.mean);
    cv.replicates = get_or(cfg, "replicates", cv.replicates);
    cv.layout_seed = get_or<std::uint64_t>(cfg, "layout_seed", cv.layout_seed);
    cv.seed = get_or<std::uint64_t>(cfg, "seed", cv.seed);
    cv.kernel = kernel_of(cfg);
    cv.fit = fit_of(cfg);
    cv.quadrature = quadrature_of(cfg);
    cv.isolation_radius = get_or(cfg, "isolation_radius", cv.isolation_radius);
    cv.jobs = get_or(cfg, "jobs", 1);

    const auto outcome = ssrf::run_crossval(cv);
    if (outcome.failed_fits > 0) {
        std::cerr << "warning: " << outcome.failed_fits << " replicate fits failed and were skipped\n";
    }
    if (outcome.report.excluded > 0) {
        std::cerr << "warning: " << outcome.report.excluded << " zero validation values excluded\n";
    }
    if (c.out.empty()) {
        std::cout << ssrf::crossval_csv(outcome);
        return 0;
    }
    const fs::path dir(c.out);
    ssrf::write_text((dir / "crossval.csv").string(), ssrf::crossval_csv(outcome));
    ssrf::write_text((dir / "train_locations.csv").string(),
                     ssrf::samples_csv(outcome.train_locations, Eigen::VectorXd::Zero(outcome.train_locations.rows())));
    ssrf::write_text((dir / "validation_locations.csv").string(),
                     ssrf::samples_csv(outcome.validation_locations,
                                       Eigen::VectorXd::Zero(outcome.validation_locations.rows())));
    return 0;
}

int cmd_bias_table(const std::vector<std::string>& kernels, int d, const Common& c) {
    std::vector<ssrf::KernelSpec> specs;
    for (const auto& k : kernels) {
        specs.push_back(ssrf::KernelSpec::from_name(k));
    }
    emit(c.out, ssrf::bias_table_csv(ssrf::bias_table(specs, d)));
    return 0;
}

int cmd_mc_bias(const Common& c) {
    json cfg = load_config(c.config_path);
    apply_flags(cfg, c);
    ssrf::McBiasConfig mc;
    mc.domain = domain_of(cfg, 0.0, 5.0);
    mc.model = model_of(get_or<json>(cfg, "model", json::object()), mc.domain.dimension());
    mc.sizes = get_or<std::vector<std::size_t>>(cfg, "sizes", mc.sizes);
    mc.replicates = get_or(cfg, "replicates", mc.replicates);
    mc.seed = get_or<std::uint64_t>(cfg, "seed", mc.seed);
    mc.kernel = kernel_of(cfg);
    mc.constraints = fit_of(cfg).constraints;
    mc.jobs = get_or(cfg, "jobs", 1);
    emit(c.out, ssrf::mc_bias_csv(ssrf::run_mc_bias(mc)));
    return 0;
}

void add_common(CLI::App* cmd, Common& c, bool fitting) {
    cmd->add_option("--config", c.config_path, "JSON config file (flags take precedence)");
    cmd->add_option("--out", c.out, "output file or directory");
    cmd->add_option("--kernel", c.kernel, "triangular | quadratic | tricube | gaussian");
    cmd->add_option("--seed", c.seed, "random seed");
    cmd->add_option("--jobs", c.jobs, "worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--replicates", c.replicates, "Monte Carlo replicates")->check(CLI::PositiveNumber);
    if (fitting) {
        cmd->add_option("--beta", c.beta, "objective exponent")->check(CLI::PositiveNumber);
        cmd->add_option("--restarts", c.restarts, "extra jittered simplex starts")->check(CLI::NonNegativeNumber);
        cmd->add_flag("--freeze-kc", c.freeze_kc, "keep kc at 2 pi / a1");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SSRF parameter inference from scattered data"};
    app.require_subcommand(1);
    Common common;
    std::string input;
    std::string curve;
    std::vector<std::string> kernels{"quadratic", "gaussian", "tricube", "triangular"};
    int dim = 2;

    auto* constraints = app.add_subcommand("constraints", "sample constraints of a CSV data set as JSON");
    constraints->add_option("input", input, "CSV with columns x1..xd,value")->required();
    add_common(constraints, common, false);

    auto* fit = app.add_subcommand("fit", "fit SSRF parameters to a CSV data set");
    fit->add_option("input", input, "CSV with columns x1..xd,value")->required();
    fit->add_option("--curve", curve, "write the fitted covariance curve CSV here");
    add_common(fit, common, true);

    auto* simulate = app.add_subcommand("simulate", "simulate Gaussian field samples");
    add_common(simulate, common, false);

    auto* experiment = app.add_subcommand("experiment-cov", "fitted covariance curves over simulated replicates");
    add_common(experiment, common, true);

    auto* crossval = app.add_subcommand("crossval", "kriging cross-validation with fitted and true covariances");
    add_common(crossval, common, true);

    auto* t1 = app.add_subcommand("table1", "asymptotic bias constants of the kernels");
    t1->add_option("--kernels", kernels, "kernel names");
    t1->add_option("--dim", dim, "dimension")->check(CLI::PositiveNumber);
    t1->add_option("--out", common.out, "output CSV (default stdout)");

    auto* mc = app.add_subcommand("mc-bias", "Monte Carlo bias and variance of the sample constraints");
    add_common(mc, common, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*constraints) return cmd_constraints(input, common);
        if (*fit) return cmd_fit(input, curve, common);
        if (*simulate) return cmd_simulate(common);
        if (*experiment) return cmd_experiment_cov(common);
        if (*crossval) return cmd_crossval(common);
        if (*t1) return cmd_bias_table(kernels, dim, common);
        if (*mc) return cmd_mc_bias(common);
    } catch (const ssrf::ArgumentError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const ssrf::DegenerateDataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const ssrf::InsufficientPairsError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
