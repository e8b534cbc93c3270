#pragma once

#include "fermat/chart.hpp"

#include <vector>

namespace fermat {

// A spatial polyline: straight segments between knots in the spatial slice.
// The time lift integrates the null condition along it, so a polyline plus a
// start time determines a future-pointing lightlike curve.
struct SpatialPolyline {
    std::vector<Vec> knots; // >= 2 spatial points
    int segments() const { return static_cast<int>(knots.size()) - 1; }

    // Piecewise-linear evaluation at s in [0,1] with equal parameter
    // allocation per segment.
    Vec at(double s) const;
    Vec tangent(int segment) const; // knot[i+1] - knot[i], per-unit-s scale
};

// A time-lifted polyline: the spatial path together with the knot times of
// its future-pointing lightlike lift, as produced by lift_time.
struct LiftedPolyline {
    SpatialPolyline path;
    std::vector<double> knot_times; // same length as path.knots
    double arrival_time() const { return knot_times.back(); }
    Event event_at_knot(int i) const { return Event(path.knots[i], knot_times[i]); }
};

struct LiftResult {
    LiftedPolyline curve;
    bool left_domain = false;   // lift escaped the chart domain
    double exit_s = 1.0;        // curve parameter where it escaped
};

enum class CausalCharacter { Timelike, Lightlike, Spacelike, Mixed };

// Integrate the future lightlike time lift of a spatial polyline:
//   dt/ds = <delta, x'> + sqrt(<delta, x'>^2 + <alpha x', x'>)
// starting at t(0) = t0.  Sub-stepped fourth-order Runge-Kutta that never
// straddles a knot, so piecewise-smooth charts integrate cleanly.  A segment
// with x' = 0 contributes exactly zero elapsed time.
LiftResult lift_time(const SplittingChart& chart, const SpatialPolyline& path,
                     double t0, int steps_per_segment = 64);

// Arrival-time functional: lift the path from p and read off the observer
// time of the terminal event.  Throws if the path does not start at p.x or
// end at obs.x_obs, or if the arrival falls outside the observer's interval.
double arrival_time(const SplittingChart& chart, const SpatialPolyline& path,
                    const Event& p, const ObserverCurve& obs,
                    int steps_per_segment = 64);

// Classify a sampled curve by the sign of g[z', z'] along it, using a
// tolerance band around zero for the lightlike verdict.
CausalCharacter causal_character(const SplittingChart& chart,
                                 const std::vector<Event>& samples,
                                 double tol = 1e-9);

// Reduction of the lightlike condition for a general observer field Y along
// a curve: solves the pointwise quadratic for the rate of the Y-parameter and
// integrates it.  For the vertical field W this must reproduce lift_time; a
// non-vertical Y in a splitting chart is a validation error.  Kept as an
// independent code path so the two derivations cross-check each other.
LiftResult global_lift(const SplittingChart& chart, const SpatialPolyline& path,
                       double t0, const Vec& y_field_direction,
                       int steps_per_segment = 64);

// Cumulative auxiliary-Riemannian length of the lifted curve (trapezoid rule
// on ||z'||_R).  This is the length the pseudo-coercivity cap compares with.
double riemann_length(const SplittingChart& chart, const LiftedPolyline& curve,
                      int samples_per_segment = 16);

// Resample a lifted polyline to n segments of equal auxiliary-Riemannian
// arc length (relative spacing error below about one percent), then re-lift.
LiftedPolyline subdivide(const SplittingChart& chart, const LiftedPolyline& curve,
                         int n_segments);

// Validate the standing assumptions of a shortening run: p inside the region,
// p not on the observer line, observer inside the region, chart domain
// containing both.  Throws Error with a domain-language message on failure.
void validate_problem(const SplittingChart& chart, const Event& p,
                      const ObserverCurve& obs, const RegionSpec& region);

} // namespace fermat
