#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace ssrf {

struct NelderMeadOptions {
    int max_iterations = 2000;
    /// Stop when max f - min f over the simplex drops below this.
    double tolerance = 1e-10;
    /// Per-coordinate initial simplex offsets; empty means 5% of |x0_i| (0.00025 for zeros).
    std::vector<double> initial_step;
    /// Number of times the simplex is rebuilt around the best vertex after convergence.
    int restarts = 0;
};

struct NelderMeadResult {
    Eigen::VectorXd x;
    double f = 0.0;
    int iterations = 0;
    bool converged = false;
    /// Best vertex value after every iteration.
    std::vector<double> trace;
};

using Objective = std::function<double(const Eigen::VectorXd&)>;

/// Simplex minimization with reflection 1, expansion 2, contraction 0.5, shrink 0.5.
/// Non-finite values away from x0 are treated as +inf. Throws ArgumentError if f(x0) is not finite.
NelderMeadResult nelder_mead(const Objective& f, const Eigen::VectorXd& x0, const NelderMeadOptions& options = {});

}  // namespace ssrf
