#include <cmath>
#include <random>
#include <gtest/gtest.h>

#include "ssrf/errors.hpp"
#include "ssrf/sample_constraints.hpp"

using namespace ssrf;

namespace {

const KernelSpec kTriangular{KernelFamily::triangular};
const KernelSpec kQuadratic{KernelFamily::quadratic};

Eigen::MatrixXd uniform_points(int n, int d, std::uint64_t seed, double side = 1.0) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(0.0, side);
    Eigen::MatrixXd x(n, d);
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < d; ++k) {
            x(i, k) = u(gen);
        }
    }
    return x;
}

Eigen::MatrixXd square_grid(int m, double a) {
    Eigen::MatrixXd x(m * m, 2);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            x(i * m + j, 0) = i * a;
            x(i * m + j, 1) = j * a;
        }
    }
    return x;
}

SampleData smooth_field(int n, std::uint64_t seed) {
    SampleData s;
    s.locations = uniform_points(n, 2, seed, 5.0);
    s.values.resize(n);
    for (int i = 0; i < n; ++i) {
        s.values(i) = std::sin(s.locations(i, 0)) + 0.5 * std::cos(1.3 * s.locations(i, 1)) + 0.1 * (i % 3);
    }
    return s;
}

// Straight double loop over ordered pairs.
double brute_average(const Eigen::MatrixXd& x, double h, const KernelSpec& k,
                     const std::function<double(int, int, double)>& a) {
    double num = 0.0;
    double den = 0.0;
    for (int i = 0; i < x.rows(); ++i) {
        for (int j = 0; j < x.rows(); ++j) {
            if (i == j) continue;
            const double s = (x.row(i) - x.row(j)).norm();
            const double w = kernel_eval(k, s / h);
            num += w * a(i, j, s);
            den += w;
        }
    }
    return num / den;
}

ConstraintOptions loose() {
    ConstraintOptions o;
    o.min_pairs = 1;
    return o;
}

}  // namespace

TEST(SampleConstraints, StepEstimate) {
    Eigen::MatrixXd two(2, 2);
    two << 0.0, 0.0, 3.0, 0.0;
    EXPECT_NEAR(estimate_step(two), 3.0, 1e-15);
    EXPECT_NEAR(estimate_step(square_grid(6, 0.7)), 0.7, 1e-14);
    Eigen::MatrixXd line(3, 1);
    line << 0.0, 1.0, 3.0;
    EXPECT_NEAR(estimate_step(line), 4.0 / 3.0, 1e-15);
    // Two nearest neighbors per point: {1, 3}, {1, 2}, {2, 3}.
    EXPECT_NEAR(estimate_step(line, 2), 2.0, 1e-15);

    Eigen::MatrixXd dup(3, 2);
    dup << 0.0, 0.0, 1.0, 1.0, 0.0, 0.0;
    EXPECT_THROW(estimate_step(dup), DegenerateDataError);
    EXPECT_THROW(estimate_step(Eigen::MatrixXd(1, 2)), DegenerateDataError);
}

TEST(SampleConstraints, PairAverageBasics) {
    const Eigen::MatrixXd x = uniform_points(30, 2, 1);
    const auto avg = kernel_pair_average(x, 0.4, kQuadratic, [](Eigen::Index, Eigen::Index, double) { return 2.5; });
    EXPECT_NEAR(avg, 2.5, 1e-14);

    Eigen::MatrixXd two(2, 2);
    two << 0.0, 0.0, 1.0, 0.0;
    const double s2 = kernel_pair_average(two, 2.0, kTriangular,
                                          [](Eigen::Index, Eigen::Index, double s) { return s * s; }, loose());
    EXPECT_DOUBLE_EQ(s2, 1.0);
}

TEST(SampleConstraints, PairAverageMatchesBruteForce) {
    const Eigen::MatrixXd x = uniform_points(5, 2, 3);
    auto payload = [](Eigen::Index, Eigen::Index, double s) { return s * s; };
    const double fast = kernel_pair_average(x, 0.9, kQuadratic, payload, loose());
    const double slow = brute_average(x, 0.9, kQuadratic, [](int, int, double s) { return s * s; });
    EXPECT_NEAR(fast / slow, 1.0, 1e-13);
}

TEST(SampleConstraints, InsufficientPairs) {
    const Eigen::MatrixXd x = uniform_points(20, 2, 4, 100.0);
    try {
        kernel_distance_moment(x, 0.01, kTriangular, 2);
        FAIL() << "expected InsufficientPairsError";
    } catch (const InsufficientPairsError& e) {
        EXPECT_DOUBLE_EQ(e.bandwidth(), 0.01);
        EXPECT_EQ(e.pairs(), 0u);
        EXPECT_NE(std::string(e.what()).find("h = 0.01"), std::string::npos);
    }
}

TEST(SampleConstraints, GridAcceleratorMatchesDirect) {
    const SampleData s = smooth_field(400, 9);
    ConstraintOptions grid;
    grid.use_grid = true;
    for (auto family : {KernelFamily::triangular, KernelFamily::tricube, KernelFamily::gaussian}) {
        const KernelSpec k{family};
        for (double h : {0.2, 0.5, 1.1}) {
            const auto direct = pair_moments(s.locations, s.values, h, k);
            const auto binned = pair_moments(s.locations, s.values, h, k, grid);
            EXPECT_EQ(direct.pairs, binned.pairs);
            EXPECT_NEAR(binned.weight / direct.weight, 1.0, 1e-12);
            EXPECT_NEAR(binned.mean_s2() / direct.mean_s2(), 1.0, 1e-12);
            EXPECT_NEAR(binned.mean_s4() / direct.mean_s4(), 1.0, 1e-12);
            EXPECT_NEAR(binned.mean_increment2() / direct.mean_increment2(), 1.0, 1e-12);
        }
    }
}

TEST(SampleConstraints, FBar) {
    SampleData c;
    c.locations = uniform_points(40, 2, 5);
    c.values = Eigen::VectorXd::Constant(40, 3.0);
    EXPECT_DOUBLE_EQ(f_bar(c, 0.5, kTriangular), 0.0);

    SampleData two;
    two.locations.resize(2, 2);
    two.locations << 0.0, 0.0, 0.5, 0.0;
    two.values.resize(2);
    two.values << 0.0, 2.0;
    EXPECT_DOUBLE_EQ(f_bar(two, 1.0, kTriangular, loose()), 2.0);

    // X(s) = s on a unit-spaced line; h = 1.5 only reaches nearest neighbors.
    SampleData ramp;
    ramp.locations.resize(10, 1);
    ramp.values.resize(10);
    for (int i = 0; i < 10; ++i) {
        ramp.locations(i, 0) = i;
        ramp.values(i) = i;
    }
    EXPECT_NEAR(f_bar(ramp, 1.5, kTriangular, loose()), 0.5, 1e-15);
}

TEST(SampleConstraints, SampleVariance) {
    SampleData s;
    s.locations = uniform_points(2, 1, 1);
    s.values.resize(2);
    s.values << 0.0, 2.0;
    EXPECT_DOUBLE_EQ(sample_variance(s), 1.0);
    s.locations = uniform_points(3, 1, 1);
    s.values.resize(3);
    s.values << 1.0, 2.0, 3.0;
    EXPECT_NEAR(sample_variance(s), 2.0 / 3.0, 1e-15);
}

TEST(SampleConstraints, GradientConstraint) {
    const SampleData s = smooth_field(200, 2);
    const double a = estimate_step(s.locations);
    const auto g = gradient_constraint(s, kTriangular, a);
    EXPECT_NEAR(g.h1, bandwidth_for_gradient(a, kTriangular, 2), 1e-15);
    EXPECT_NEAR(g.phi1_bar, 2.0 * f_bar(s, g.h1, kTriangular), 1e-14);
    EXPECT_NEAR(g.s1_bar, g.phi1_bar / (a * a), 1e-12);

    SampleData c = s;
    c.values.setConstant(1.0);
    EXPECT_DOUBLE_EQ(gradient_constraint(c, kTriangular, a).phi1_bar, 0.0);
}

TEST(SampleConstraints, MuCoefficientsTranscription) {
    const Eigen::MatrixXd x = uniform_points(20, 2, 21);
    const double h = 0.45;
    const auto mu = mu_coefficients(x, kQuadratic, h, loose());

    auto s2 = [](int, int, double s) { return s * s; };
    auto s4 = [](int, int, double s) { return s * s * s * s; };
    const double r2 = std::sqrt(2.0);
    const double a1 = brute_average(x, h, kQuadratic, s2);
    const double ar = brute_average(x, r2 * h, kQuadratic, s2);
    const double a2 = brute_average(x, 2 * h, kQuadratic, s2);
    const double q1 = brute_average(x, h, kQuadratic, s4);
    const double qr = brute_average(x, r2 * h, kQuadratic, s4);
    const double q2 = brute_average(x, 2 * h, kQuadratic, s4);
    const double c1 = 4.0, c2 = 32.0, c3 = 8.0;
    const double mu2 = ((c2 + 8 * c1) * q1 + c1 * q1 * a2 / a1 - c1 * q2) / (c3 * qr - c3 * q1 * ar / a1);
    const double mu1 = (c3 * mu2 * ar + c1 * a2) / (c2 * a1);
    EXPECT_NEAR(mu.mu2 / mu2, 1.0, 1e-12);
    EXPECT_NEAR(mu.mu1 / mu1, 1.0, 1e-12);
}

TEST(SampleConstraints, MuCoefficientsLimits) {
    const Eigen::MatrixXd x = uniform_points(1000, 2, 8);
    const double a = estimate_step(x);
    const auto mu = mu_coefficients(x, kQuadratic, bandwidth_for_curvature(a, kQuadratic, 2));
    EXPECT_NEAR(mu.mu1, 1.0, 0.1);
    EXPECT_NEAR(mu.mu2, 1.0, 0.15);

    Eigen::MatrixXd line(50, 1);
    for (int i = 0; i < 50; ++i) line(i, 0) = i;
    EXPECT_THROW(mu_coefficients(line, kQuadratic, 3.0), DegenerateLayoutError);
}

TEST(SampleConstraints, CurvatureConstraint) {
    const SampleData s = smooth_field(200, 6);
    const double a = estimate_step(s.locations);
    const auto c = curvature_constraint(s, kTriangular, a);
    EXPECT_NEAR(c.h2, bandwidth_for_curvature(a, kTriangular, 2), 1e-15);
    const double f1 = f_bar(s, c.h2, kTriangular);
    const double f2 = f_bar(s, std::sqrt(2.0) * c.h2, kTriangular);
    const double f4 = f_bar(s, 2.0 * c.h2, kTriangular);
    EXPECT_NEAR(c.phi2_bar, 0.5 * (32 * c.mu1 * f1 - 8 * c.mu2 * f2 - 4 * f4), 1e-12);
    EXPECT_NEAR(c.s2_bar, c.phi2_bar / std::pow(a, 4), 1e-9);

    SampleData flat = s;
    flat.values.setConstant(-2.0);
    EXPECT_DOUBLE_EQ(curvature_constraint(flat, kTriangular, a).phi2_bar, 0.0);
}

TEST(SampleConstraints, LinearFieldHasNoCurvature) {
    SampleData ramp;
    ramp.locations = square_grid(30, 0.1);
    ramp.values = 2.0 * ramp.locations.col(0) - 0.5 * ramp.locations.col(1);
    const double a = estimate_step(ramp.locations);
    const auto g = gradient_constraint(ramp, kQuadratic, a);
    const auto c = curvature_constraint(ramp, kQuadratic, a);
    EXPECT_LE(std::abs(c.phi2_bar), 0.05 * g.phi1_bar);

    SampleData line;
    line.locations.resize(40, 1);
    line.values.resize(40);
    for (int i = 0; i < 40; ++i) {
        line.locations(i, 0) = 0.1 * i;
        line.values(i) = 3.0 * line.locations(i, 0);
    }
    const auto c1 = curvature_constraint(line, kQuadratic, estimate_step(line.locations));
    EXPECT_DOUBLE_EQ(c1.mu2, 1.0);
    EXPECT_NEAR(c1.phi2_bar, 0.0, 1e-12);
}

TEST(SampleConstraints, LatticeConstraints) {
    const std::size_t m = 8;
    const double a = 0.5;
    LatticeField f;
    f.shape = {m, m};
    f.spacing = a;
    f.values.assign(m * m, 4.0);
    auto l = lattice_constraints(f);
    EXPECT_DOUBLE_EQ(l.s0, 0.0);
    EXPECT_DOUBLE_EQ(l.s1, 0.0);
    EXPECT_DOUBLE_EQ(l.s2, 0.0);

    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) f.values[i * m + j] = static_cast<double>(i) * a;
    l = lattice_constraints(f);
    EXPECT_NEAR(l.s1, 1.0, 1e-14);
    EXPECT_NEAR(l.s2, 0.0, 1e-14);

    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) f.values[i * m + j] = static_cast<double>(i * i) * a * a;
    l = lattice_constraints(f);
    EXPECT_NEAR(l.s2, 4.0, 1e-12);

    LatticeField tiny;
    tiny.shape = {2, 5};
    tiny.values.assign(10, 0.0);
    EXPECT_THROW(lattice_constraints(tiny), ArgumentError);
}

TEST(SampleConstraints, EstimateAll) {
    const SampleData s = smooth_field(200, 12);
    const auto e = estimate_all(s, kTriangular);
    EXPECT_GT(e.a1, 0.0);
    EXPECT_EQ(e.a1, e.a2);
    EXPECT_NEAR(e.h1, e.a1 / std::sqrt(moment_ratio(kTriangular, 2, 2)), 1e-14);
    EXPECT_NEAR(e.h2, e.a1 / std::pow(moment_ratio(kTriangular, 4, 2), 0.25), 1e-14);
    EXPECT_EQ(e.kernel, "triangular");
    EXPECT_EQ(e.dimension, 2);

    SampleData flat = s;
    flat.values.setConstant(7.0);
    const auto z = estimate_all(flat, kTriangular);
    EXPECT_DOUBLE_EQ(z.s0_bar, 0.0);
    EXPECT_DOUBLE_EQ(z.phi1_bar, 0.0);
    EXPECT_DOUBLE_EQ(z.phi2_bar, 0.0);

    SampleData two;
    two.locations.resize(2, 2);
    two.locations << 0.0, 0.0, 1.0, 1.0;
    two.values.resize(2);
    two.values << 1.0, 2.0;
    EXPECT_THROW(estimate_all(two, kTriangular), InsufficientPairsError);
}

TEST(SampleConstraints, Invariances) {
    const SampleData s = smooth_field(150, 14);
    const auto base = estimate_all(s, kTriangular);

    SampleData moved = s;
    moved.locations.rowwise() += Eigen::RowVector2d(3.0, -7.5);
    moved.values.array() += 11.0;
    const auto m = estimate_all(moved, kTriangular);
    EXPECT_NEAR(m.a1 / base.a1, 1.0, 1e-12);
    EXPECT_NEAR(m.s0_bar / base.s0_bar, 1.0, 1e-12);
    EXPECT_NEAR(m.phi1_bar / base.phi1_bar, 1.0, 1e-10);
    EXPECT_NEAR(m.phi2_bar / base.phi2_bar, 1.0, 1e-9);

    SampleData scaled = s;
    scaled.values *= 3.0;
    const auto sc = estimate_all(scaled, kTriangular);
    EXPECT_NEAR(sc.s0_bar / base.s0_bar, 9.0, 1e-11);
    EXPECT_NEAR(sc.phi1_bar / base.phi1_bar, 9.0, 1e-11);
    EXPECT_NEAR(sc.phi2_bar / base.phi2_bar, 9.0, 1e-10);

    SampleData perm = s;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        perm.locations.row(i) = s.locations.row(s.size() - 1 - i);
        perm.values(i) = s.values(s.size() - 1 - i);
    }
    const auto p = estimate_all(perm, kTriangular);
    EXPECT_NEAR(p.phi1_bar / base.phi1_bar, 1.0, 1e-12);
    EXPECT_NEAR(p.phi2_bar / base.phi2_bar, 1.0, 1e-11);
}

TEST(SampleConstraints, ConsistencyPrincipleClosure) {
    const Eigen::MatrixXd x = uniform_points(1000, 2, 31);
    const double a = estimate_step(x);
    const double h1 = bandwidth_for_gradient(a, kQuadratic, 2);
    const double h2 = bandwidth_for_curvature(a, kQuadratic, 2);
    EXPECT_NEAR(kernel_distance_moment(x, h1, kQuadratic, 2) / (a * a), 1.0, 0.05);
    EXPECT_NEAR(kernel_distance_moment(x, h2, kQuadratic, 4) / std::pow(a, 4), 1.0, 0.08);
}

TEST(SampleConstraints, RefinedBandwidthSolvesFixedPoint) {
    SampleData s = smooth_field(300, 17);
    const double a = estimate_step(s.locations);
    ConstraintOptions opts;
    opts.refine_bandwidth = true;
    const auto g = gradient_constraint(s, kTriangular, a, opts);
    EXPECT_NEAR(kernel_distance_moment(s.locations, g.h1, kTriangular, 2) / (a * a), 1.0, 1e-8);
    const auto c = curvature_constraint(s, kTriangular, a, opts);
    EXPECT_NEAR(kernel_distance_moment(s.locations, c.h2, kTriangular, 4) / std::pow(a, 4), 1.0, 1e-8);
}
