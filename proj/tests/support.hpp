#pragma once

// Shared helpers for the unit-test binaries: deterministic random data and
// small chart builders used across several suites.

#include "fermat/chart.hpp"
#include "fermat/causal.hpp"

#include <cmath>
#include <random>

namespace testsupport {

using fermat::Event;
using fermat::Mat;
using fermat::SpatialPolyline;
using fermat::SplittingChart;
using fermat::Vec;

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline Vec random_vec(std::mt19937_64& gen, int n, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    Vec v(n);
    for (int i = 0; i < n; ++i)
        v(i) = u(gen);
    return v;
}

// Functional chart with alpha = exp(2*x0) * I on the plane; its Christoffel
// symbols have the closed forms printed by tests/oracles/conformal_christoffel.py.
inline SplittingChart conformal_chart() {
    SplittingChart chart;
    chart.dim = 3;
    chart.name = "conformal_exp";
    chart.alpha = [](const Vec& x, double) {
        return Mat(std::exp(2.0 * x(0)) * Mat::Identity(2, 2));
    };
    chart.delta = [](const Vec& x, double) { return Vec(Vec::Zero(x.size())); };
    chart.in_domain = [](const Vec&, double) { return true; };
    return chart;
}

// Grid-sampled version of the same conformal chart on [-0.5, 0.5]^2.
inline SplittingChart conformal_grid_chart(int nodes_per_axis) {
    std::vector<std::vector<double>> axes(2);
    for (int d = 0; d < 2; ++d)
        for (int i = 0; i < nodes_per_axis; ++i)
            axes[d].push_back(-0.5 + i / (nodes_per_axis - 1.0));
    std::vector<Mat> alphas;
    std::vector<Vec> deltas;
    for (double x0 : axes[0])
        for (double x1 : axes[1]) {
            (void)x1;
            alphas.push_back(Mat(std::exp(2.0 * x0) * Mat::Identity(2, 2)));
            deltas.push_back(Vec(Vec::Zero(2)));
        }
    return fermat::grid_chart(axes, alphas, deltas);
}

// Random zig-zag polyline from p to q with transverse amplitude `amp`.
inline SpatialPolyline random_zigzag(std::mt19937_64& gen, const Vec& p, const Vec& q,
                                     int interior, double amp) {
    std::uniform_real_distribution<double> u(-amp, amp);
    SpatialPolyline path;
    path.knots.push_back(p);
    for (int k = 1; k <= interior; ++k) {
        const double w = k / (interior + 1.0);
        Vec x = p + w * (q - p);
        for (int c = 0; c < x.size(); ++c)
            x(c) += u(gen) * ((k % 2) ? 1.0 : -1.0);
        path.knots.push_back(x);
    }
    path.knots.push_back(q);
    return path;
}

} // namespace testsupport
