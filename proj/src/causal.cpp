#include "fermat/causal.hpp"

#include <algorithm>
#include <cmath>

namespace fermat {

Vec SpatialPolyline::at(double s) const {
    const int m = segments();
    if (m < 1)
        throw Error(ErrorCode::DegenerateCurve, "polyline needs at least two knots");
    const double u = std::clamp(s, 0.0, 1.0) * m;
    const int i = std::min(static_cast<int>(u), m - 1);
    const double local = u - i;
    return knots[i] + local * (knots[i + 1] - knots[i]);
}

Vec SpatialPolyline::tangent(int segment) const {
    // dx/ds on the segment: the chord scaled by the segment count, since each
    // segment spans parameter 1/segments().
    return (knots[segment + 1] - knots[segment]) * static_cast<double>(segments());
}

namespace {

// Right-hand side of the future lightlike lift: the positive root of
// g[(x', t'), (x', t')] = 0 solved for t'.
double lift_rate(const SplittingChart& chart, const Vec& x, double t, const Vec& xdot) {
    const Vec d = chart.delta(x, t);
    const Mat a = chart.alpha(x, t);
    const double dd = d.dot(xdot);
    const double aa = xdot.dot(a * xdot);
    return dd + std::sqrt(std::max(0.0, dd * dd + aa));
}

} // namespace

LiftResult lift_time(const SplittingChart& chart, const SpatialPolyline& path,
                     double t0, int steps_per_segment) {
    const int m = path.segments();
    if (m < 1)
        throw Error(ErrorCode::DegenerateCurve, "polyline needs at least two knots");
    LiftResult result;
    result.curve.path = path;
    result.curve.knot_times.assign(path.knots.size(), t0);

    // Integrate the elapsed time e(s) from zero and add t0 when reading the
    // clock.  For charts that never read t this makes the lift exactly
    // equivariant under time shifts, which the shortening flow's monotone
    // acceptance rule relies on.
    double elapsed = 0.0;
    for (int i = 0; i < m; ++i) {
        const Vec xdot = path.tangent(i);
        const double h = 1.0 / (m * static_cast<double>(steps_per_segment));
        for (int j = 0; j < steps_per_segment; ++j) {
            const double s = (i + j / static_cast<double>(steps_per_segment)) / m;
            const Vec x1 = path.at(s);
            if (!chart.in_domain(x1, t0 + elapsed)) {
                result.left_domain = true;
                result.exit_s = s;
                result.curve.knot_times.resize(i + 1);
                result.curve.path.knots.resize(i + 1);
                return result;
            }
            const double k1 = lift_rate(chart, x1, t0 + elapsed, xdot);
            const Vec x2 = path.at(s + 0.5 * h);
            const double k2 = lift_rate(chart, x2, t0 + elapsed + 0.5 * h * k1, xdot);
            const double k3 = lift_rate(chart, x2, t0 + elapsed + 0.5 * h * k2, xdot);
            const Vec x4 = path.at(s + h);
            const double k4 = lift_rate(chart, x4, t0 + elapsed + h * k3, xdot);
            elapsed += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        result.curve.knot_times[i + 1] = t0 + elapsed;
        if (!chart.in_domain(path.knots[i + 1], t0 + elapsed)) {
            result.left_domain = true;
            result.exit_s = (i + 1.0) / m;
            result.curve.knot_times.resize(i + 2);
            result.curve.path.knots.resize(i + 2);
            return result;
        }
    }
    return result;
}

double arrival_time(const SplittingChart& chart, const SpatialPolyline& path,
                    const Event& p, const ObserverCurve& obs,
                    int steps_per_segment) {
    if ((path.knots.front() - p.x).norm() > 1e-9 * (1.0 + p.x.norm()))
        throw Error(ErrorCode::Validation, "path must start at the source event's spatial position");
    if ((path.knots.back() - obs.x_obs).norm() > 1e-9 * (1.0 + obs.x_obs.norm()))
        throw Error(ErrorCode::Validation, "path must end on the observer worldline");
    const LiftResult lifted = lift_time(chart, path, p.t, steps_per_segment);
    if (lifted.left_domain)
        throw Error(ErrorCode::OutOfDomain, "lifted path leaves the chart domain", lifted.exit_s);
    const double tau = lifted.curve.arrival_time();
    if (!obs.contains_time(tau))
        throw Error(ErrorCode::OutsideWorldlineDomain,
                    "arrival time falls outside the observer's parameter interval", tau);
    return tau;
}

CausalCharacter causal_character(const SplittingChart& chart,
                                 const std::vector<Event>& samples,
                                 double tol) {
    if (samples.size() < 2)
        throw Error(ErrorCode::DegenerateCurve, "causal classification needs at least two samples");
    bool any_time = false, any_light = false, any_space = false;
    for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
        const Vec dz = samples[i + 1].coords() - samples[i].coords();
        Event mid(0.5 * (samples[i].x + samples[i + 1].x),
                  0.5 * (samples[i].t + samples[i + 1].t));
        const double q = eval_metric(chart, mid, dz, dz);
        const double scale = riemann_inner(chart, mid, dz, dz);
        if (scale <= 0.0)
            throw Error(ErrorCode::DegenerateCurve, "curve has a vanishing segment");
        if (q < -tol * scale)
            any_time = true;
        else if (q > tol * scale)
            any_space = true;
        else
            any_light = true;
    }
    const int kinds = (any_time ? 1 : 0) + (any_light ? 1 : 0) + (any_space ? 1 : 0);
    if (kinds > 1) return CausalCharacter::Mixed;
    if (any_time) return CausalCharacter::Timelike;
    if (any_space) return CausalCharacter::Spacelike;
    return CausalCharacter::Lightlike;
}

LiftResult global_lift(const SplittingChart& chart, const SpatialPolyline& path,
                       double t0, const Vec& y_field_direction,
                       int steps_per_segment) {
    if (y_field_direction.size() != chart.dim)
        throw Error(ErrorCode::Validation, "reference field dimension does not match the chart");
    const double yt = y_field_direction(chart.dim - 1);
    if (yt <= 0.0 || y_field_direction.head(chart.sdim()).norm() > 1e-12 * yt)
        throw Error(ErrorCode::Validation,
                    "splitting charts support only future-pointing vertical reference fields");

    // Solve g[Y, .] and the quadratic null condition along the curve for the
    // rate of the Y parameter sigma:
    //   sigma' = ( g[Y,eta] + sqrt(g[Y,eta]^2 - g[Y,Y] g[eta,eta]) ) / (-g[Y,Y])
    // with eta the horizontal velocity (x', 0), then t' = sigma' * Y^t.  This
    // is an independent derivation of the lift and must agree with lift_time.
    const int m = path.segments();
    if (m < 1)
        throw Error(ErrorCode::DegenerateCurve, "polyline needs at least two knots");
    LiftResult result;
    result.curve.path = path;
    result.curve.knot_times.assign(path.knots.size(), t0);

    auto rate = [&](const Vec& x, double t, const Vec& xdot) {
        Event z(x, t);
        Vec eta = Vec::Zero(chart.dim);
        eta.head(chart.sdim()) = xdot;
        const double gyy = eval_metric(chart, z, y_field_direction, y_field_direction);
        const double gye = eval_metric(chart, z, y_field_direction, eta);
        const double gee = eval_metric(chart, z, eta, eta);
        if (gyy >= 0.0)
            throw Error(ErrorCode::Validation, "reference field must be timelike along the curve");
        const double disc = std::max(0.0, gye * gye - gyy * gee);
        return (gye + std::sqrt(disc)) / (-gyy);
    };

    double elapsed = 0.0; // in units of t, i.e. sigma * Y^t
    for (int i = 0; i < m; ++i) {
        const Vec xdot = path.tangent(i);
        const double h = 1.0 / (m * static_cast<double>(steps_per_segment));
        for (int j = 0; j < steps_per_segment; ++j) {
            const double s = (i + j / static_cast<double>(steps_per_segment)) / m;
            const Vec x1 = path.at(s);
            if (!chart.in_domain(x1, t0 + elapsed)) {
                result.left_domain = true;
                result.exit_s = s;
                result.curve.knot_times.resize(i + 1);
                result.curve.path.knots.resize(i + 1);
                return result;
            }
            const double k1 = rate(x1, t0 + elapsed, xdot) * yt;
            const Vec x2 = path.at(s + 0.5 * h);
            const double k2 = rate(x2, t0 + elapsed + 0.5 * h * k1, xdot) * yt;
            const double k3 = rate(x2, t0 + elapsed + 0.5 * h * k2, xdot) * yt;
            const Vec x4 = path.at(s + h);
            const double k4 = rate(x4, t0 + elapsed + h * k3, xdot) * yt;
            elapsed += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        result.curve.knot_times[i + 1] = t0 + elapsed;
    }
    return result;
}

double riemann_length(const SplittingChart& chart, const LiftedPolyline& curve,
                      int samples_per_segment) {
    const int m = curve.path.segments();
    double total = 0.0;
    for (int i = 0; i < m; ++i) {
        const Vec xdot = curve.path.tangent(i);
        double prev = 0.0;
        for (int j = 0; j <= samples_per_segment; ++j) {
            const double frac = j / static_cast<double>(samples_per_segment);
            const double s = (i + frac) / m;
            const Vec x = curve.path.at(s);
            const double t = curve.knot_times[i] +
                             frac * (curve.knot_times[i + 1] - curve.knot_times[i]);
            Vec zdot(chart.dim);
            zdot.head(chart.sdim()) = xdot;
            zdot(chart.sdim()) = lift_rate(chart, x, t, xdot);
            const double speed = riemann_norm(chart, Event(x, t), zdot);
            if (j > 0)
                total += 0.5 * (prev + speed) / (m * samples_per_segment);
            prev = speed;
        }
    }
    return total;
}

LiftedPolyline subdivide(const SplittingChart& chart, const LiftedPolyline& curve,
                         int n_segments) {
    if (n_segments < 1)
        throw Error(ErrorCode::Validation, "subdivision needs at least one segment");
    const int m = curve.path.segments();
    const int fine = 64; // dense sampling for the arc-length table
    std::vector<double> s_table{0.0}, len_table{0.0};
    s_table.reserve(m * fine + 1);
    len_table.reserve(m * fine + 1);
    double total = 0.0;
    for (int i = 0; i < m; ++i) {
        const Vec xdot = curve.path.tangent(i);
        double prev = -1.0;
        for (int j = 0; j <= fine; ++j) {
            const double frac = j / static_cast<double>(fine);
            const double s = (i + frac) / m;
            const Vec x = curve.path.at(s);
            const double t = curve.knot_times[i] +
                             frac * (curve.knot_times[i + 1] - curve.knot_times[i]);
            Vec zdot(chart.dim);
            zdot.head(chart.sdim()) = xdot;
            zdot(chart.sdim()) = lift_rate(chart, x, t, xdot);
            const double speed = riemann_norm(chart, Event(x, t), zdot);
            if (prev >= 0.0) {
                total += 0.5 * (prev + speed) / (m * fine);
                s_table.push_back(s);
                len_table.push_back(total);
            }
            prev = speed;
        }
    }

    SpatialPolyline path;
    path.knots.reserve(n_segments + 1);
    path.knots.push_back(curve.path.knots.front());
    for (int k = 1; k < n_segments; ++k) {
        const double target = total * k / n_segments;
        if (total <= 0.0) {
            path.knots.push_back(curve.path.at(k / static_cast<double>(n_segments)));
            continue;
        }
        auto it = std::lower_bound(len_table.begin(), len_table.end(), target);
        const std::size_t hi = std::min<std::size_t>(it - len_table.begin(), len_table.size() - 1);
        const std::size_t lo = hi == 0 ? 0 : hi - 1;
        const double span = len_table[hi] - len_table[lo];
        const double w = span > 0.0 ? (target - len_table[lo]) / span : 0.0;
        path.knots.push_back(curve.path.at(s_table[lo] + w * (s_table[hi] - s_table[lo])));
    }
    path.knots.push_back(curve.path.knots.back());

    const LiftResult lifted = lift_time(chart, path, curve.knot_times.front());
    if (lifted.left_domain)
        throw Error(ErrorCode::OutOfDomain, "subdivided path leaves the chart domain", lifted.exit_s);
    return lifted.curve;
}

void validate_problem(const SplittingChart& chart, const Event& p,
                      const ObserverCurve& obs, const RegionSpec& region) {
    if (p.x.size() != chart.sdim() || obs.x_obs.size() != chart.sdim())
        throw Error(ErrorCode::Validation, "event dimensions do not match the chart");
    if (!chart.contains(p))
        throw Error(ErrorCode::OutOfDomain, "source event lies outside the chart domain");
    if (!chart.in_domain(obs.x_obs, p.t))
        throw Error(ErrorCode::OutOfDomain, "observer position lies outside the chart domain");
    if (!region.inside(p))
        throw Error(ErrorCode::Validation, "source event lies outside the region of interest");
    if (!region.inside(Event(obs.x_obs, p.t)))
        throw Error(ErrorCode::Validation, "observer position lies outside the region of interest");
    if ((p.x - obs.x_obs).norm() <= 1e-9 * (1.0 + obs.x_obs.norm()))
        throw Error(ErrorCode::NotOnObserver, "source event must not lie on the observer worldline");
    if (!(obs.t_min < obs.t_max))
        throw Error(ErrorCode::Validation, "observer parameter interval is empty");
}

} // namespace fermat
