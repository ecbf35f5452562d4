#include "ssrf/sample_constraints.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "ssrf/coefficients.hpp"
#include "ssrf/errors.hpp"

namespace ssrf {

namespace {

struct CompensatedSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double x) {
        const double t = sum + x;
        comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
        sum = t;
    }
    [[nodiscard]] double value() const { return sum + comp; }
};

double distance(const Eigen::MatrixXd& X, Eigen::Index i, Eigen::Index j) {
    double acc = 0.0;
    for (Eigen::Index k = 0; k < X.cols(); ++k) {
        const double diff = X(i, k) - X(j, k);
        acc += diff * diff;
    }
    return std::sqrt(acc);
}

// Calls visit(i, j, s_ij) for every ordered pair i != j with s_ij < reach.
template <class Visit>
void for_each_pair(const Eigen::MatrixXd& X, double reach, bool use_grid, Visit&& visit) {
    const Eigen::Index n = X.rows();
    if (!use_grid || !std::isfinite(reach)) {
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                if (j == i) {
                    continue;
                }
                const double s = distance(X, i, j);
                if (s < reach) {
                    visit(i, j, s);
                }
            }
        }
        return;
    }

    const Eigen::Index d = X.cols();
    const Eigen::RowVectorXd origin = X.colwise().minCoeff();
    std::vector<std::vector<long>> cell_of(static_cast<std::size_t>(n), std::vector<long>(d));
    std::map<std::vector<long>, std::vector<Eigen::Index>> bins;
    for (Eigen::Index i = 0; i < n; ++i) {
        auto& c = cell_of[static_cast<std::size_t>(i)];
        for (Eigen::Index k = 0; k < d; ++k) {
            c[k] = static_cast<long>(std::floor((X(i, k) - origin(k)) / reach));
        }
        bins[c].push_back(i);
    }

    long offsets = 1;
    for (Eigen::Index k = 0; k < d; ++k) {
        offsets *= 3;
    }
    std::vector<long> probe(d);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& home = cell_of[static_cast<std::size_t>(i)];
        for (long code = 0; code < offsets; ++code) {
            long rest = code;
            for (Eigen::Index k = 0; k < d; ++k) {
                probe[k] = home[k] + (rest % 3) - 1;
                rest /= 3;
            }
            const auto it = bins.find(probe);
            if (it == bins.end()) {
                continue;
            }
            for (Eigen::Index j : it->second) {
                if (j == i) {
                    continue;
                }
                const double s = distance(X, i, j);
                if (s < reach) {
                    visit(i, j, s);
                }
            }
        }
    }
}

void require_bandwidth(double h) {
    if (!(h > 0.0) || !std::isfinite(h)) {
        throw ArgumentError("kernel bandwidth must be positive and finite");
    }
}

void require_pairs(double h, std::size_t pairs, const ConstraintOptions& opts) {
    if (pairs < opts.min_pairs || pairs == 0) {
        throw InsufficientPairsError(h, pairs, std::max<std::size_t>(opts.min_pairs, 1));
    }
}

MuCoefficients mu_from_moments(const PairMoments& at1, const PairMoments& at_sqrt2, const PairMoments& at2,
                               int d) {
    if (d < 2) {
        throw DegenerateLayoutError("mu coefficients are undefined for d = 1 (c_d^(3) = 0)");
    }
    const auto c = stencil_coefficients(d);
    const double a1 = at1.mean_s2();
    const double a_sqrt2 = at_sqrt2.mean_s2();
    const double a2 = at2.mean_s2();
    const double q1 = at1.mean_s4();
    const double q_sqrt2 = at_sqrt2.mean_s4();
    const double q2 = at2.mean_s4();

    const double num = (c.c2 + 8.0 * c.c1) * q1 + c.c1 * q1 * a2 / a1 - c.c1 * q2;
    const double den = c.c3 * q_sqrt2 - c.c3 * q1 * a_sqrt2 / a1;
    if (!std::isfinite(num) || !std::isfinite(den) || std::abs(den) <= 1e-12 * c.c3 * q_sqrt2) {
        throw DegenerateLayoutError("mu2 denominator vanishes for this sampling layout");
    }
    MuCoefficients mu;
    mu.mu2 = num / den;
    mu.mu1 = (c.c3 * mu.mu2 * a_sqrt2 + c.c1 * a2) / (c.c2 * a1);
    return mu;
}

// Fixed-point refinement of <s^p>_h = a^p starting from the explicit bandwidth.
double refine_bandwidth(const Eigen::MatrixXd& X, const KernelSpec& spec, double a, double h, int power,
                        const ConstraintOptions& opts) {
    for (int it = 0; it < opts.refine_iterations; ++it) {
        const double m = kernel_distance_moment(X, h, spec, power, opts);
        const double next = h * a / std::pow(m, 1.0 / power);
        if (std::abs(next / h - 1.0) < opts.refine_tolerance) {
            return next;
        }
        h = next;
    }
    return h;
}

}  // namespace

void SampleData::validate() const {
    if (locations.rows() != values.size()) {
        throw ArgumentError("locations and values differ in length");
    }
    if (locations.cols() < 1) {
        throw ArgumentError("locations need at least one coordinate column");
    }
    if (locations.rows() < 2) {
        throw DegenerateDataError("insufficient data: at least 2 samples are required");
    }
    if (!locations.allFinite() || !values.allFinite()) {
        throw DegenerateDataError("sample data contain non-finite entries");
    }
}

double estimate_step(const Eigen::MatrixXd& locations, int neighbors) {
    const Eigen::Index n = locations.rows();
    if (n < 2) {
        throw DegenerateDataError("insufficient data: step estimate needs at least 2 locations");
    }
    if (neighbors < 1 || neighbors > n - 1) {
        throw ArgumentError("neighbor count must lie in [1, n-1]");
    }
    const double d = static_cast<double>(locations.cols());
    std::vector<double> dist(static_cast<std::size_t>(n - 1));
    CompensatedSum acc;
    for (Eigen::Index i = 0; i < n; ++i) {
        std::size_t k = 0;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j != i) {
                dist[k++] = distance(locations, i, j);
            }
        }
        std::partial_sort(dist.begin(), dist.begin() + neighbors, dist.end());
        if (dist[0] == 0.0) {
            std::ostringstream os;
            os << "duplicate sampling location at row " << i;
            throw DegenerateDataError(os.str());
        }
        for (int m = 0; m < neighbors; ++m) {
            acc.add(std::pow(dist[static_cast<std::size_t>(m)], d));
        }
    }
    return std::pow(acc.value() / static_cast<double>(n * neighbors), 1.0 / d);
}

PairMoments pair_moments(const Eigen::MatrixXd& locations, const Eigen::VectorXd& values, double h,
                         const KernelSpec& spec, const ConstraintOptions& opts) {
    require_bandwidth(h);
    const bool with_values = values.size() > 0;
    if (with_values && values.size() != locations.rows()) {
        throw ArgumentError("locations and values differ in length");
    }
    CompensatedSum w, s2, s4, inc;
    std::size_t ordered = 0;
    for_each_pair(locations, spec.support_radius() * h, opts.use_grid,
                  [&](Eigen::Index i, Eigen::Index j, double s) {
                      const double k = kernel_eval(spec, s / h);
                      if (k <= 0.0) {
                          return;
                      }
                      ++ordered;
                      const double sq = s * s;
                      w.add(k);
                      s2.add(k * sq);
                      s4.add(k * sq * sq);
                      if (with_values) {
                          const double dx = values(i) - values(j);
                          inc.add(k * dx * dx);
                      }
                  });
    PairMoments out;
    out.pairs = ordered / 2;
    require_pairs(h, out.pairs, opts);
    out.weight = w.value();
    out.s2 = s2.value();
    out.s4 = s4.value();
    out.increment2 = inc.value();
    return out;
}

double kernel_pair_average(const Eigen::MatrixXd& locations, double h, const KernelSpec& spec,
                           const PairPayload& payload, const ConstraintOptions& opts) {
    require_bandwidth(h);
    CompensatedSum num, den;
    std::size_t ordered = 0;
    for_each_pair(locations, spec.support_radius() * h, opts.use_grid,
                  [&](Eigen::Index i, Eigen::Index j, double s) {
                      const double k = kernel_eval(spec, s / h);
                      if (k <= 0.0) {
                          return;
                      }
                      ++ordered;
                      num.add(k * payload(i, j, s));
                      den.add(k);
                  });
    require_pairs(h, ordered / 2, opts);
    return num.value() / den.value();
}

double kernel_distance_moment(const Eigen::MatrixXd& locations, double h, const KernelSpec& spec, int power,
                              const ConstraintOptions& opts) {
    const PairMoments m = pair_moments(locations, Eigen::VectorXd(), h, spec, opts);
    switch (power) {
        case 0: return 1.0;
        case 2: return m.mean_s2();
        case 4: return m.mean_s4();
        default:
            return kernel_pair_average(
                locations, h, spec, [power](Eigen::Index, Eigen::Index, double s) { return std::pow(s, power); },
                opts);
    }
}

double f_bar(const SampleData& data, double h, const KernelSpec& spec, const ConstraintOptions& opts) {
    data.validate();
    return 0.5 * pair_moments(data.locations, data.values, h, spec, opts).mean_increment2();
}

double sample_variance(const SampleData& data) {
    data.validate();
    const double mean = data.values.mean();
    CompensatedSum acc;
    for (Eigen::Index i = 0; i < data.values.size(); ++i) {
        const double r = data.values(i) - mean;
        acc.add(r * r);
    }
    return acc.value() / static_cast<double>(data.values.size());
}

GradientEstimate gradient_constraint(const SampleData& data, const KernelSpec& spec, double a1,
                                     const ConstraintOptions& opts) {
    data.validate();
    const int d = data.dimension();
    GradientEstimate out;
    out.h1 = bandwidth_for_gradient(a1, spec, d);
    if (opts.refine_bandwidth) {
        out.h1 = refine_bandwidth(data.locations, spec, a1, out.h1, 2, opts);
    }
    out.phi1_bar = d * f_bar(data, out.h1, spec, opts);
    out.s1_bar = out.phi1_bar / (a1 * a1);
    return out;
}

MuCoefficients mu_coefficients(const Eigen::MatrixXd& locations, const KernelSpec& spec, double h2,
                               const ConstraintOptions& opts) {
    const int d = static_cast<int>(locations.cols());
    if (d < 2) {
        throw DegenerateLayoutError("mu coefficients are undefined for d = 1 (c_d^(3) = 0)");
    }
    const Eigen::VectorXd none;
    return mu_from_moments(pair_moments(locations, none, h2, spec, opts),
                           pair_moments(locations, none, std::sqrt(2.0) * h2, spec, opts),
                           pair_moments(locations, none, 2.0 * h2, spec, opts), d);
}

CurvatureEstimate curvature_constraint(const SampleData& data, const KernelSpec& spec, double a2,
                                       const ConstraintOptions& opts) {
    data.validate();
    const int d = data.dimension();
    const auto c = stencil_coefficients(d);
    CurvatureEstimate out;
    out.h2 = bandwidth_for_curvature(a2, spec, d);
    if (opts.refine_bandwidth) {
        out.h2 = refine_bandwidth(data.locations, spec, a2, out.h2, 4, opts);
    }
    const PairMoments at1 = pair_moments(data.locations, data.values, out.h2, spec, opts);
    const PairMoments at2 = pair_moments(data.locations, data.values, 2.0 * out.h2, spec, opts);
    const double f1 = 0.5 * at1.mean_increment2();
    const double f4 = 0.5 * at2.mean_increment2();

    if (d == 1) {
        out.mu2 = 1.0;
        out.mu1 = c.c1 * at2.mean_s2() / (c.c2 * at1.mean_s2());
        out.phi2_bar = 0.5 * (c.c2 * out.mu1 * f1 - c.c1 * f4);
    } else {
        const PairMoments at_sqrt2 =
            pair_moments(data.locations, data.values, std::sqrt(2.0) * out.h2, spec, opts);
        const double f2 = 0.5 * at_sqrt2.mean_increment2();
        const MuCoefficients mu = mu_from_moments(at1, at_sqrt2, at2, d);
        out.mu1 = mu.mu1;
        out.mu2 = mu.mu2;
        out.phi2_bar = 0.5 * (c.c2 * out.mu1 * f1 - c.c3 * out.mu2 * f2 - c.c1 * f4);
    }
    out.s2_bar = out.phi2_bar / std::pow(a2, 4);
    return out;
}

LatticeConstraints lattice_constraints(const LatticeField& field) {
    const std::size_t d = field.shape.size();
    if (d == 0) {
        throw ArgumentError("lattice needs at least one axis");
    }
    if (!(field.spacing > 0.0)) {
        throw ArgumentError("lattice spacing must be positive");
    }
    std::size_t total = 1;
    for (std::size_t len : field.shape) {
        if (len < 3) {
            throw ArgumentError("lattice too small for the second-difference stencil (need >= 3 sites per axis)");
        }
        total *= len;
    }
    if (field.values.size() != total) {
        throw ArgumentError("lattice value count does not match its shape");
    }

    std::vector<std::size_t> stride(d, 1);
    for (std::size_t k = d - 1; k > 0; --k) {
        stride[k - 1] = stride[k] * field.shape[k];
    }

    const double a = field.spacing;
    const double mean = std::accumulate(field.values.begin(), field.values.end(), 0.0) / static_cast<double>(total);
    CompensatedSum s0, s1, s2;
    std::size_t n1 = 0;
    std::size_t n2 = 0;
    std::vector<std::size_t> idx(d, 0);
    for (std::size_t site = 0; site < total; ++site) {
        std::size_t rest = site;
        bool forward = true;
        bool interior = true;
        for (std::size_t k = 0; k < d; ++k) {
            idx[k] = rest / stride[k];
            rest %= stride[k];
            forward = forward && idx[k] + 1 < field.shape[k];
            interior = interior && idx[k] >= 1 && idx[k] + 1 < field.shape[k];
        }
        const double x = field.values[site];
        s0.add((x - mean) * (x - mean));
        if (forward) {
            double g = 0.0;
            for (std::size_t k = 0; k < d; ++k) {
                const double diff = field.values[site + stride[k]] - x;
                g += diff * diff;
            }
            s1.add(g / (a * a));
            ++n1;
        }
        if (interior) {
            double lap = 0.0;
            for (std::size_t k = 0; k < d; ++k) {
                lap += (field.values[site + stride[k]] + field.values[site - stride[k]] - 2.0 * x) / (a * a);
            }
            s2.add(lap * lap);
            ++n2;
        }
    }
    LatticeConstraints out;
    out.s0 = s0.value() / static_cast<double>(total);
    out.s1 = s1.value() / static_cast<double>(n1);
    out.s2 = s2.value() / static_cast<double>(n2);
    return out;
}

ConstraintEstimates estimate_all(const SampleData& data, const KernelSpec& spec, const ConstraintOptions& opts) {
    data.validate();
    ConstraintEstimates out;
    out.dimension = data.dimension();
    out.kernel = std::string(spec.name());
    out.a1 = estimate_step(data.locations, opts.neighbors);
    out.a2 = out.a1;
    out.s0_bar = sample_variance(data);
    const GradientEstimate g = gradient_constraint(data, spec, out.a1, opts);
    out.phi1_bar = g.phi1_bar;
    out.s1_bar = g.s1_bar;
    out.h1 = g.h1;
    const CurvatureEstimate c = curvature_constraint(data, spec, out.a2, opts);
    out.phi2_bar = c.phi2_bar;
    out.s2_bar = c.s2_bar;
    out.h2 = c.h2;
    out.mu1 = c.mu1;
    out.mu2 = c.mu2;
    return out;
}

}  // namespace ssrf
