#include "ssrf/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ssrf/errors.hpp"

namespace ssrf {

namespace {

constexpr double kReflect = 1.0;
constexpr double kExpand = 2.0;
constexpr double kContract = 0.5;
constexpr double kShrink = 0.5;

double safe_eval(const Objective& f, const Eigen::VectorXd& x) {
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

struct Simplex {
    std::vector<Eigen::VectorXd> x;
    std::vector<double> f;

    void order() {
        std::vector<std::size_t> idx(x.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return f[a] < f[b]; });
        std::vector<Eigen::VectorXd> xs;
        std::vector<double> fs;
        for (std::size_t i : idx) {
            xs.push_back(x[i]);
            fs.push_back(f[i]);
        }
        x.swap(xs);
        f.swap(fs);
    }
};

Simplex build_simplex(const Objective& f, const Eigen::VectorXd& x0, double f0, const NelderMeadOptions& opt) {
    const Eigen::Index n = x0.size();
    Simplex s;
    s.x.push_back(x0);
    s.f.push_back(f0);
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::VectorXd v = x0;
        double step;
        if (!opt.initial_step.empty()) {
            step = opt.initial_step[static_cast<std::size_t>(i)];
        } else {
            step = x0(i) != 0.0 ? 0.05 * x0(i) : 0.00025;
        }
        v(i) += step;
        s.x.push_back(v);
        s.f.push_back(safe_eval(f, v));
    }
    s.order();
    return s;
}

}  // namespace

NelderMeadResult nelder_mead(const Objective& f, const Eigen::VectorXd& x0, const NelderMeadOptions& options) {
    const Eigen::Index n = x0.size();
    if (n < 1) {
        throw ArgumentError("nelder_mead needs at least one variable");
    }
    if (!options.initial_step.empty() && options.initial_step.size() != static_cast<std::size_t>(n)) {
        throw ArgumentError("initial_step length must match the number of variables");
    }
    if (options.max_iterations < 1 || !(options.tolerance >= 0.0)) {
        throw ArgumentError("nelder_mead needs max_iterations >= 1 and tolerance >= 0");
    }
    const double f0 = f(x0);
    if (!std::isfinite(f0)) {
        throw ArgumentError("objective is not finite at the starting point");
    }

    NelderMeadResult out;
    Simplex s = build_simplex(f, x0, f0, options);
    const std::size_t worst = static_cast<std::size_t>(n);
    int rounds_left = options.restarts;

    while (out.iterations < options.max_iterations) {
        if (s.f[worst] - s.f[0] < options.tolerance) {
            if (rounds_left-- > 0) {
                s = build_simplex(f, s.x[0], s.f[0], options);
                continue;
            }
            out.converged = true;
            break;
        }
        ++out.iterations;

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
        for (std::size_t i = 0; i < worst; ++i) {
            centroid += s.x[i];
        }
        centroid /= static_cast<double>(n);

        const Eigen::VectorXd xr = centroid + kReflect * (centroid - s.x[worst]);
        const double fr = safe_eval(f, xr);
        bool shrink = false;

        if (fr < s.f[0]) {
            const Eigen::VectorXd xe = centroid + kExpand * (xr - centroid);
            const double fe = safe_eval(f, xe);
            if (fe < fr) {
                s.x[worst] = xe;
                s.f[worst] = fe;
            } else {
                s.x[worst] = xr;
                s.f[worst] = fr;
            }
        } else if (fr < s.f[worst - 1]) {
            s.x[worst] = xr;
            s.f[worst] = fr;
        } else if (fr < s.f[worst]) {
            const Eigen::VectorXd xc = centroid + kContract * (xr - centroid);
            const double fc = safe_eval(f, xc);
            if (fc <= fr) {
                s.x[worst] = xc;
                s.f[worst] = fc;
            } else {
                shrink = true;
            }
        } else {
            const Eigen::VectorXd xcc = centroid + kContract * (s.x[worst] - centroid);
            const double fcc = safe_eval(f, xcc);
            if (fcc < s.f[worst]) {
                s.x[worst] = xcc;
                s.f[worst] = fcc;
            } else {
                shrink = true;
            }
        }

        if (shrink) {
            for (std::size_t i = 1; i <= worst; ++i) {
                s.x[i] = s.x[0] + kShrink * (s.x[i] - s.x[0]);
                s.f[i] = safe_eval(f, s.x[i]);
            }
        }
        s.order();
        out.trace.push_back(s.f[0]);
    }
    if (!out.converged && s.f[worst] - s.f[0] < options.tolerance && rounds_left <= 0) {
        out.converged = true;
    }
    out.x = s.x[0];
    out.f = s.f[0];
    return out;
}

}  // namespace ssrf
