#include "ssrf/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "ssrf/errors.hpp"

namespace ssrf {

void QuadratureConfig::validate() const {
    if (!(relative_tolerance > 0.0 && relative_tolerance <= 1e-3)) {
        throw ArgumentError("quadrature relative_tolerance must lie in (0, 1e-3]");
    }
    if (max_subdivisions < 16) {
        throw ArgumentError("quadrature max_subdivisions must be >= 16");
    }
}

QuadratureResult integrate(const std::function<double(double)>& f, double lo, double hi,
                           const QuadratureConfig& config, std::span<const double> breakpoints) {
    config.validate();
    QuadratureResult out;
    if (hi == lo) {
        return out;
    }
    if (hi < lo) {
        out = integrate(f, hi, lo, config, breakpoints);
        out.value = -out.value;
        return out;
    }

    std::vector<double> edges;
    edges.reserve(breakpoints.size() + 2);
    edges.push_back(lo);
    for (double b : breakpoints) {
        if (b > lo && b < hi) {
            edges.push_back(b);
        }
    }
    edges.push_back(hi);
    std::sort(edges.begin(), edges.end());

    // Bisection depth that yields at most max_subdivisions leaves per piece.
    const auto depth = static_cast<unsigned>(std::ceil(std::log2(config.max_subdivisions)));
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;

    double sum = 0.0;
    double comp = 0.0;
    for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
        if (edges[k + 1] <= edges[k]) {
            continue;
        }
        double err = 0.0;
        double l1 = 0.0;
        const double piece =
            GK::integrate(f, edges[k], edges[k + 1], depth, config.relative_tolerance, &err, &l1);
        // Neumaier summation keeps many-piece sums order-stable.
        const double t = sum + piece;
        comp += std::abs(sum) >= std::abs(piece) ? (sum - t) + piece : (piece - t) + sum;
        sum = t;
        out.error += err;
        out.l1 += l1;
    }
    out.value = sum + comp;

    if (!std::isfinite(out.value)) {
        throw NumericError("quadrature produced a non-finite value", out.error);
    }
    const double scale = std::max(out.l1, std::numeric_limits<double>::min());
    if (out.error > 10.0 * config.relative_tolerance * scale) {
        std::ostringstream os;
        os << "quadrature did not converge: achieved relative error " << out.error / scale
           << " > " << config.relative_tolerance;
        throw NumericError(os.str(), out.error / scale);
    }
    return out;
}

}  // namespace ssrf
