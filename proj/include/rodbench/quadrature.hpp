#pragma once

#include <cmath>
#include <vector>

#include "rodbench/errors.hpp"

namespace rodbench {

/// Gauss-Legendre rule mapped to [0,1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Nodes by Newton iteration on the Legendre polynomial; exact for
/// polynomials of degree 2n-1.
inline GaussRule gauss_legendre(int n) {
    if (n < 1) throw DimensionMismatch("gauss rule needs at least one point");
    GaussRule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        double w = 2.0 / ((1.0 - z * z) * pp * pp);
        rule.nodes[static_cast<std::size_t>(i)] = 0.5 * (1.0 - z);
        rule.nodes[static_cast<std::size_t>(n - 1 - i)] = 0.5 * (1.0 + z);
        rule.weights[static_cast<std::size_t>(i)] = 0.5 * w;
        rule.weights[static_cast<std::size_t>(n - 1 - i)] = 0.5 * w;
    }
    return rule;
}

/// Composite quadrature of a callable over [a,b]: `panels` sub-intervals,
/// each integrated with the given [0,1] Gauss rule. F returns any type
/// supporting zero-init via the `acc` seed and += of a scaled value.
template <class Acc, class F>
Acc composite_gauss(const GaussRule& rule, double a, double b, int panels, Acc acc, const F& f) {
    double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        double lo = a + p * h;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i)
            acc += (rule.weights[i] * h) * f(lo + rule.nodes[i] * h);
    }
    return acc;
}

/// Composite Simpson weights over an even number of uniform intervals.
template <class Acc, class F>
Acc simpson_grid(int intervals, double h, Acc acc, const F& value_at) {
    if (intervals < 2 || intervals % 2 != 0)
        throw DimensionMismatch("simpson needs an even interval count");
    for (int i = 0; i <= intervals; ++i) {
        double w = (i == 0 || i == intervals) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        acc += (w * h / 3.0) * value_at(i);
    }
    return acc;
}

}  // namespace rodbench
