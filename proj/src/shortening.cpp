#include "fermat/shortening.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace fermat {

namespace {

// Lift a spatial path at the flow's working resolution.  Returns an empty
// optional when the lift escapes the chart domain, which the flow treats as
// an infinitely bad candidate.
std::optional<LiftedPolyline> flow_lift(const SplittingChart& chart,
                                        const SpatialPolyline& path, double t0,
                                        const ShorteningConfig& cfg) {
    const LiftResult r = lift_time(chart, path, t0, cfg.flow_steps_per_segment);
    if (r.left_domain)
        return std::nullopt;
    return r.curve;
}

// Piece of the flow between two averaging nodes: the spatial sub-path and
// its arrival time when lifted from the piece's start time.
struct Piece {
    SpatialPolyline path;
    double arrival = std::numeric_limits<double>::infinity();
};

void consider(const SplittingChart& chart, const ShorteningConfig& cfg,
              double t0, const SpatialPolyline& path, Piece* best) {
    const auto lifted = flow_lift(chart, path, t0, cfg);
    if (!lifted)
        return;
    if (lifted->arrival_time() < best->arrival) {
        best->path = path;
        best->arrival = lifted->arrival_time();
    }
}

// Sample a recorded geodesic into a short spatial polyline with exact
// endpoints, so it can re-enter the flow as a piece.
SpatialPolyline geodesic_to_path(const GeodesicRecord& rec, const Vec& start_x,
                                 const Vec& end_x, int knots) {
    SpatialPolyline path;
    path.knots.push_back(start_x);
    for (int k = 1; k < knots; ++k)
        path.knots.push_back(rec.position_at(rec.s.back() * k / knots).x);
    path.knots.push_back(end_x);
    return path;
}

// Lightlike geodesic connecting two spatial knots, found by Newton shooting
// from the lifted chord.  Empty when the chord leaves the chart or shooting
// fails; callers fall back to the chord tangent in that case.
std::optional<GeodesicRecord> solve_arc(const SplittingChart& chart, const Vec& x0,
                                        double t0, const Vec& x1) {
    SpatialPolyline chord;
    chord.knots = {x0, x1};
    const LiftResult lifted = lift_time(chart, chord, t0, 16);
    if (lifted.left_domain)
        return std::nullopt;
    ObserverCurve line;
    line.x_obs = x1;
    const RefineResult r = refine_geodesic(chart, lifted.curve, line, 1.0 / 64.0, 1e-9, 30);
    if (!r.converged || r.geodesic.left_domain)
        return std::nullopt;
    return r.geodesic;
}

// Largest tangent jump across the interior junctions, measured as the
// Riemannian angle between the incoming and outgoing tangents of the
// lightlike arcs joining consecutive knots.  A polyline chord carries the
// whole bend of a curved segment at its knots, so the chord-to-chord angle
// has a resolution floor; the connecting arcs do not, and their tangent jump
// vanishes exactly when the broken curve is a single geodesic.
double junction_angle(const SplittingChart& chart, const LiftedPolyline& curve,
                      double snap_tol) {
    const int m = curve.path.segments();
    std::vector<std::optional<GeodesicRecord>> arcs(m);
    std::vector<bool> degenerate(m, false);
    for (int i = 0; i < m; ++i) {
        const Vec chord = curve.path.knots[i + 1] - curve.path.knots[i];
        if (chord.norm() <= snap_tol) {
            degenerate[i] = true; // constant piece: no direction to compare
            continue;
        }
        arcs[i] = solve_arc(chart, curve.path.knots[i], curve.knot_times[i],
                            curve.path.knots[i + 1]);
    }

    auto chord_tangent = [&](int i) {
        Vec u(chart.dim);
        u.head(chart.sdim()) = curve.path.knots[i + 1] - curve.path.knots[i];
        u(chart.sdim()) = curve.knot_times[i + 1] - curve.knot_times[i];
        return u;
    };

    double worst = 0.0;
    for (int i = 1; i < m; ++i) {
        if (degenerate[i - 1] || degenerate[i])
            continue;
        const Vec u = arcs[i - 1] ? arcs[i - 1]->v.back() : chord_tangent(i - 1);
        const Vec v = arcs[i] ? arcs[i]->v.front() : chord_tangent(i);
        const Event at = curve.event_at_knot(i);
        const double nu = riemann_norm(chart, at, u);
        const double nv = riemann_norm(chart, at, v);
        if (nu <= 0.0 || nv <= 0.0)
            continue;
        const double c = std::clamp(riemann_inner(chart, at, u, v) / (nu * nv), -1.0, 1.0);
        worst = std::max(worst, std::acos(c));
    }
    return worst;
}

bool nodes_inside(const RegionSpec& region, const LiftedPolyline& curve) {
    for (std::size_t i = 0; i < curve.path.knots.size(); ++i)
        if (!region.inside(Event(curve.path.knots[i], curve.knot_times[i])))
            return false;
    return true;
}

// Arc-length midpoints of every segment of the current curve (targets of the
// second averaging pass).
std::vector<Vec> segment_midpoints(const LiftedPolyline& curve) {
    const int m = curve.path.segments();
    std::vector<Vec> mids;
    mids.reserve(m);
    for (int i = 0; i < m; ++i) {
        // Straight segments in nearly-flat charts have their arc midpoint at
        // the chord midpoint to high accuracy; the averaging step only needs
        // a point in the interior of the segment, so the chord midpoint is
        // used directly.
        mids.push_back(0.5 * (curve.path.knots[i] + curve.path.knots[i + 1]));
    }
    return mids;
}

// Shared machinery of the two averaging passes: walk the target list,
// replace every piece by the best competitor, and assemble the candidate.
std::optional<FlowState> averaging_pass(const SplittingChart& chart,
                                        const FlowState& state,
                                        const ShorteningConfig& cfg,
                                        const std::vector<Vec>& targets,
                                        const std::vector<SpatialPolyline>& old_subpaths) {
    const Vec p_x = state.curve.path.knots.front();
    const double t0 = state.curve.knot_times.front();

    Event q(p_x, t0);
    std::vector<Vec> knots{p_x};
    const int pieces = static_cast<int>(targets.size());
    for (int i = 0; i < pieces; ++i) {
        const Vec& target = targets[i];
        Piece best;

        SpatialPolyline chord;
        chord.knots = {q.x, target};
        consider(chart, cfg, q.t, chord, &best);

        if (i < static_cast<int>(old_subpaths.size()) && old_subpaths[i].segments() >= 1)
            consider(chart, cfg, q.t, old_subpaths[i], &best);

        const LocalMinResult lm =
            local_fermat_minimizer(chart, q, target, cfg, 1.0 / pieces);
        consider(chart, cfg, q.t, lm.curve.path, &best);

        if (!std::isfinite(best.arrival))
            return std::nullopt; // every competitor left the chart domain
        for (std::size_t k = 1; k < best.path.knots.size(); ++k)
            knots.push_back(best.path.knots[k]);
        q = Event(target, best.arrival);
    }

    SpatialPolyline merged;
    merged.knots = std::move(knots);
    const auto lifted = flow_lift(chart, merged, t0, cfg);
    if (!lifted)
        return std::nullopt;

    // Canonicalize back to the configured segment count before comparing.
    FlowState cand;
    try {
        LiftedPolyline even = subdivide(chart, *lifted, cfg.n_segments);
        const auto relift = flow_lift(chart, even.path, t0, cfg);
        if (!relift)
            return std::nullopt;
        cand.curve = *relift;
    } catch (const Error&) {
        return std::nullopt;
    }
    cand.tau = cand.curve.arrival_time();
    cand.round = state.round;
    return cand;
}

} // namespace

LocalMinResult local_fermat_minimizer(const SplittingChart& chart,
                                      const Event& q, const Vec& target_x,
                                      const ShorteningConfig& cfg,
                                      double interval_fraction) {
    LocalMinResult result;

    // Start from the straight chord; it doubles as the fallback of last
    // resort when both stages fail.
    SpatialPolyline chord;
    chord.knots = {q.x, target_x};
    const LiftResult chord_lift = lift_time(chart, chord, q.t, 16);
    if (!chord_lift.left_domain) {
        result.curve = chord_lift.curve;
        result.arrival = chord_lift.curve.arrival_time();
    }

    if ((target_x - q.x).norm() <= cfg.snap_tol) {
        // Degenerate piece: the constant curve already arrives instantly.
        result.newton_converged = true;
        return result;
    }

    // Stage two first: Newton shooting for the connecting lightlike geodesic
    // is cheap and almost always lands inside the trust region; the descent
    // stage below only runs when shooting fails.
    ObserverCurve line;
    line.x_obs = target_x;
    (void)interval_fraction; // pieces are solved on a unit parameter span
    const double sub_step = 1.0 / 64.0;
    if (!chord_lift.left_domain) {
        const RefineResult newton =
            refine_geodesic(chart, chord_lift.curve, line, sub_step, 1e-9, cfg.local_newton_iters);
        if (newton.converged && !newton.geodesic.left_domain) {
            SpatialPolyline sampled = geodesic_to_path(newton.geodesic, q.x, target_x, 4);
            const LiftResult lifted = lift_time(chart, sampled, q.t, 16);
            if (!lifted.left_domain && lifted.curve.arrival_time() <= result.arrival) {
                result.curve = lifted.curve;
                result.arrival = lifted.curve.arrival_time();
                result.newton_converged = true;
                return result;
            }
        }
    }

    // Stage one: damped coordinate descent of the arrival time over the
    // interior nodes of a small polyline.  Runs only when shooting failed
    // (strong lensing inside a piece, domain boundary grazing, ...).
    const int grid = std::max(2, cfg.local_min_grid);
    SpatialPolyline poly;
    poly.knots.reserve(grid + 2);
    for (int k = 0; k <= grid + 1; ++k)
        poly.knots.push_back(q.x + (target_x - q.x) * (k / (grid + 1.0)));

    auto objective = [&](const SpatialPolyline& trial) {
        const LiftResult r = lift_time(chart, trial, q.t, 8);
        return r.left_domain ? std::numeric_limits<double>::infinity()
                             : r.curve.arrival_time();
    };

    double current = objective(poly);
    const double span = (target_x - q.x).norm();
    const double gstep = 1e-6 * (1.0 + span);
    double lr = 0.05 * span;
    for (int iter = 0; iter < 24 && std::isfinite(current); ++iter) {
        // Central-difference gradient over all interior node coordinates.
        Mat grad = Mat::Zero(chart.sdim(), grid);
        for (int nkt = 1; nkt <= grid; ++nkt) {
            for (int c = 0; c < chart.sdim(); ++c) {
                SpatialPolyline up = poly, dn = poly;
                up.knots[nkt](c) += gstep;
                dn.knots[nkt](c) -= gstep;
                const double fu = objective(up), fd = objective(dn);
                if (!std::isfinite(fu) || !std::isfinite(fd)) {
                    grad(c, nkt - 1) = 0.0;
                    continue;
                }
                grad(c, nkt - 1) = (fu - fd) / (2.0 * gstep);
            }
        }
        const double gn = grad.norm();
        if (gn < 1e-12)
            break;
        bool moved = false;
        for (int back = 0; back < 10; ++back) {
            SpatialPolyline trial = poly;
            for (int nkt = 1; nkt <= grid; ++nkt)
                trial.knots[nkt] -= (lr / gn) * grad.col(nkt - 1);
            const double f = objective(trial);
            if (f < current) {
                poly = trial;
                current = f;
                lr *= 1.4;
                moved = true;
                break;
            }
            lr *= 0.5;
        }
        if (!moved)
            break;
    }

    if (std::isfinite(current) && current < result.arrival) {
        const LiftResult r = lift_time(chart, poly, q.t, 16);
        if (!r.left_domain) {
            result.curve = r.curve;
            result.arrival = r.curve.arrival_time();
            result.used_fallback = true;
        }
    }
    if (!std::isfinite(result.arrival))
        throw Error(ErrorCode::OutOfDomain,
                    "no candidate curve between the piece endpoints stays in the chart domain");
    return result;
}

FlowState eta1_step(const SplittingChart& chart, const FlowState& state,
                    const ObserverCurve& obs, const ShorteningConfig& cfg) {
    const int m = state.curve.path.segments();
    std::vector<Vec> targets;
    std::vector<SpatialPolyline> olds;
    for (int i = 0; i < m; ++i) {
        targets.push_back(i == m - 1 ? obs.x_obs : state.curve.path.knots[i + 1]);
        SpatialPolyline sub;
        sub.knots = {state.curve.path.knots[i], state.curve.path.knots[i + 1]};
        olds.push_back(sub);
    }
    const auto cand = averaging_pass(chart, state, cfg, targets, olds);
    return cand ? *cand : state;
}

FlowState eta2_step(const SplittingChart& chart, const FlowState& state,
                    const ObserverCurve& obs, const ShorteningConfig& cfg) {
    const int m = state.curve.path.segments();
    const std::vector<Vec> mids = segment_midpoints(state.curve);
    std::vector<Vec> targets;
    std::vector<SpatialPolyline> olds;
    for (int i = 0; i < m; ++i) {
        targets.push_back(mids[i]);
        SpatialPolyline sub;
        if (i == 0)
            sub.knots = {state.curve.path.knots.front(), mids[0]};
        else
            sub.knots = {mids[i - 1], state.curve.path.knots[i], mids[i]};
        olds.push_back(sub);
    }
    targets.push_back(obs.x_obs);
    SpatialPolyline tail;
    tail.knots = {mids[m - 1], state.curve.path.knots.back()};
    olds.push_back(tail);
    const auto cand = averaging_pass(chart, state, cfg, targets, olds);
    return cand ? *cand : state;
}

ShorteningConfig resolve_config(const SplittingChart& chart, const Event& p,
                                const ObserverCurve& obs, ShorteningConfig cfg) {
    const double chord = (obs.x_obs - p.x).norm();
    if (cfg.rho_star <= 0.0)
        cfg.rho_star = 0.1 * (2.0 * chord);
    if (cfg.d_cap <= 0.0) {
        SpatialPolyline straight;
        straight.knots = {p.x, obs.x_obs};
        const LiftResult sl = lift_time(chart, straight, p.t, cfg.flow_steps_per_segment);
        const double base = sl.left_domain ? 2.0 * std::sqrt(2.0) * chord
                                           : riemann_length(chart, sl.curve);
        cfg.d_cap = 20.0 * base;
    }
    return cfg;
}

ShorteningResult run_shortening(const SplittingChart& chart,
                                const LiftedPolyline& initial,
                                const Event& p, const ObserverCurve& obs,
                                const RegionSpec& region,
                                const ShorteningConfig& cfg_in) {
    const ShorteningConfig cfg = resolve_config(chart, p, obs, cfg_in);

    ShorteningResult out;
    if ((initial.path.knots.front() - p.x).norm() > cfg.snap_tol * (1.0 + p.x.norm()) ||
        std::abs(initial.knot_times.front() - p.t) > cfg.snap_tol * (1.0 + std::abs(p.t)))
        throw Error(ErrorCode::Validation, "initial curve must start at the source event");
    if ((initial.path.knots.back() - obs.x_obs).norm() > cfg.snap_tol * (1.0 + obs.x_obs.norm()))
        throw Error(ErrorCode::Validation, "initial curve must end on the observer worldline");

    FlowState cur;
    try {
        LiftedPolyline even = subdivide(chart, initial, cfg.n_segments);
        const auto lifted = flow_lift(chart, even.path, p.t, cfg);
        if (!lifted)
            throw Error(ErrorCode::OutOfDomain, "initial curve leaves the chart domain");
        cur.curve = *lifted;
    } catch (const Error& e) {
        out.stop = StopReason::LeftRegion;
        out.note = std::string("initial curve rejected: ") + e.what();
        return out;
    }
    cur.tau = cur.curve.arrival_time();

    auto guard = [&](const FlowState& st, ShorteningResult* res) {
        if (!nodes_inside(region, st.curve)) {
            res->stop = StopReason::LeftRegion;
            res->note = "a flow node left the region of interest";
            return false;
        }
        if (riemann_length(chart, st.curve) > cfg.d_cap) {
            res->stop = StopReason::LengthCapExceeded;
            res->note = "cumulative curve length exceeded the coercivity cap";
            return false;
        }
        return true;
    };

    if (!guard(cur, &out)) {
        out.curve = cur.curve;
        return out;
    }

    out.stop = StopReason::MaxRounds;
    for (int round = 1; round <= cfg.max_rounds; ++round) {
        const double tau_before = cur.tau;

        // Candidates are accepted only when they do not increase the arrival
        // time, so the recorded history is nonincreasing by construction.
        FlowState cand = eta1_step(chart, cur, obs, cfg);
        if (cand.tau <= cur.tau && nodes_inside(region, cand.curve))
            cur = cand;
        cand = eta2_step(chart, cur, obs, cfg);
        if (cand.tau <= cur.tau && nodes_inside(region, cand.curve))
            cur = cand;

        cur.round = round;
        out.tau_history.push_back(cur.tau);
        out.rounds = round;

        if (!guard(cur, &out)) {
            out.curve = cur.curve;
            return out;
        }

        // The tangent-jump half of the stopping rule needs one shooting solve
        // per segment, so it is only evaluated once the arrival time has
        // stagnated.
        if (tau_before - cur.tau < cfg.tau_tol) {
            const double angle = junction_angle(chart, cur.curve, cfg.snap_tol);
            out.final_junction_angle = angle;
            if (angle < cfg.junction_tol) {
                out.stop = StopReason::Converged;
                break;
            }
        }
    }

    out.curve = cur.curve;
    if (out.stop == StopReason::MaxRounds)
        out.final_junction_angle = junction_angle(chart, cur.curve, cfg.snap_tol);
    if (out.stop != StopReason::Converged) {
        out.note = "flow did not meet the stopping rule within the round budget";
        return out;
    }

    RefineResult refined = refine_geodesic(chart, cur.curve, obs, cfg.rk_step);
    if (refined.converged) {
        // Soundness check on the polished ray: it must stay inside the region.
        const int probes = 64;
        for (int k = 0; k <= probes; ++k) {
            const double s = refined.geodesic.s.back() * k / probes;
            if (!region.inside(refined.geodesic.position_at(s))) {
                out.stop = StopReason::LeftRegion;
                out.note = "refined ray leaves the region of interest";
                break;
            }
        }
        out.refined = std::move(refined);
    } else {
        out.note = "geodesic refinement did not converge; flow polyline retained";
    }
    return out;
}

SpatialPolyline hint_path(const Event& p, const ObserverCurve& obs, const StartHint& hint) {
    SpatialPolyline path;
    if (hint.kind == "straight") {
        path.knots = {p.x, obs.x_obs};
        return path;
    }
    if (hint.kind == "via") {
        path.knots.push_back(p.x);
        for (const Vec& w : hint.waypoints)
            path.knots.push_back(w);
        path.knots.push_back(obs.x_obs);
        return path;
    }
    if (hint.kind == "side") {
        if (p.x.size() < 2)
            throw Error(ErrorCode::Validation, "side hints need at least two spatial dimensions");
        const Vec chord = obs.x_obs - p.x;
        Vec normal = Vec::Zero(p.x.size());
        normal(0) = -chord(1);
        normal(1) = chord(0);
        const double n = normal.norm();
        if (n <= 0.0)
            throw Error(ErrorCode::Validation, "side hint is degenerate for a vanishing chord");
        normal /= n;
        path.knots = {p.x, 0.5 * (p.x + obs.x_obs) + hint.offset * normal, obs.x_obs};
        return path;
    }
    if (hint.kind == "winding") {
        if (p.x.size() < 2)
            throw Error(ErrorCode::Validation, "winding hints need at least two spatial dimensions");
        // Spiral in the leading coordinate plane around the origin: radius and
        // angle interpolated with the requested number of extra turns.
        const double r0 = std::hypot(p.x(0), p.x(1));
        const double r1 = std::hypot(obs.x_obs(0), obs.x_obs(1));
        if (r0 <= 0.0 || r1 <= 0.0)
            throw Error(ErrorCode::Validation, "winding hints need endpoints away from the origin");
        const double a0 = std::atan2(p.x(1), p.x(0));
        double a1 = std::atan2(obs.x_obs(1), obs.x_obs(0));
        a1 += 2.0 * M_PI * hint.winding;
        const int steps = std::max(8, 8 * std::abs(hint.winding) + 4);
        path.knots.push_back(p.x);
        for (int k = 1; k < steps; ++k) {
            const double w = k / static_cast<double>(steps);
            const double r = r0 + w * (r1 - r0);
            const double a = a0 + w * (a1 - a0);
            Vec x = p.x + w * (obs.x_obs - p.x); // trailing coordinates: linear
            x(0) = r * std::cos(a);
            x(1) = r * std::sin(a);
            path.knots.push_back(x);
        }
        path.knots.push_back(obs.x_obs);
        return path;
    }
    throw Error(ErrorCode::Validation, "unknown start hint kind '" + hint.kind + "'");
}

std::vector<LiftedPolyline> multi_start(const SplittingChart& chart,
                                        const Event& p, const ObserverCurve& obs,
                                        const std::vector<StartHint>& hints,
                                        const ShorteningConfig& cfg) {
    std::vector<LiftedPolyline> starts;
    for (const StartHint& hint : hints) {
        const SpatialPolyline path = hint_path(p, obs, hint);
        const auto lifted = flow_lift(chart, path, p.t, cfg);
        if (lifted)
            starts.push_back(*lifted);
    }
    return starts;
}

ConvexityReport check_light_convexity(const SplittingChart& chart,
                                      const RegionSpec& region,
                                      int n_samples, double horizon,
                                      std::uint64_t seed) {
    ConvexityReport report;
    const auto& boundary = region.boundary_samples;
    if (boundary.size() < 4 || n_samples < 1)
        return report;

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, boundary.size() - 1);
    std::normal_distribution<double> gauss(0.0, 1.0);

    Vec com = Vec::Zero(boundary.front().x.size());
    for (const Event& b : boundary)
        com += b.x;
    com /= static_cast<double>(boundary.size());
    double scale = 0.0;
    for (const Event& b : boundary)
        scale = std::max(scale, (b.x - com).norm());
    const double eps = 1e-3 * (1.0 + scale);

    // Nudge a boundary sample to a nearby interior point, trying the center
    // direction, its opposite, and a few random directions.
    auto pull_inside = [&](const Event& b) -> std::optional<Event> {
        std::vector<Vec> dirs;
        Vec toward = com - b.x;
        if (toward.norm() > 0.0)
            dirs.push_back(toward.normalized());
        if (!dirs.empty())
            dirs.push_back(-dirs.front());
        for (int k = 0; k < 4; ++k) {
            Vec r(b.x.size());
            for (int c = 0; c < r.size(); ++c)
                r(c) = gauss(rng);
            if (r.norm() > 0.0)
                dirs.push_back(r.normalized());
        }
        for (const Vec& d : dirs) {
            Event cand(b.x + eps * d, b.t);
            if (region.inside(cand) && chart.contains(cand))
                return cand;
        }
        return std::nullopt;
    };

    ShorteningConfig probe_cfg;
    probe_cfg.local_min_grid = 6;

    // Connecting probes: near-boundary pairs joined by the best lightlike
    // connector found; any interior excursion is a convexity violation.
    for (int trial = 0; trial < n_samples; ++trial) {
        const auto a = pull_inside(boundary[pick(rng)]);
        const auto b = pull_inside(boundary[pick(rng)]);
        if (!a || !b || (a->x - b->x).norm() < 10.0 * eps)
            continue;
        ++report.samples_checked;

        bool outside = false;
        SpatialPolyline chord;
        chord.knots = {a->x, b->x};
        const LiftResult chord_lift = lift_time(chart, chord, a->t, 16);
        if (!chord_lift.left_domain) {
            ObserverCurve line;
            line.x_obs = b->x;
            const RefineResult ray = refine_geodesic(chart, chord_lift.curve, line, 1.0 / 256.0);
            if (ray.converged) {
                const int probes = 96;
                for (int k = 1; k < probes; ++k)
                    if (!region.inside(ray.geodesic.position_at(ray.geodesic.s.back() * k / probes)))
                        outside = true;
            } else {
                try {
                    const LocalMinResult lm = local_fermat_minimizer(chart, *a, b->x, probe_cfg, 1.0);
                    for (std::size_t k = 1; k + 1 < lm.curve.path.knots.size(); ++k)
                        if (!region.inside(Event(lm.curve.path.knots[k], lm.curve.knot_times[k])))
                            outside = true;
                } catch (const Error&) {
                    continue;
                }
            }
        } else {
            // The chord itself leaves the chart; fall back to the local
            // minimizer from scratch.
            try {
                const LocalMinResult lm = local_fermat_minimizer(chart, *a, b->x, probe_cfg, 1.0);
                for (std::size_t k = 1; k + 1 < lm.curve.path.knots.size(); ++k)
                    if (!region.inside(Event(lm.curve.path.knots[k], lm.curve.knot_times[k])))
                        outside = true;
            } catch (const Error&) {
                continue;
            }
        }
        if (outside)
            ++report.pair_violations;
    }

    // Grazing probes: lightlike geodesics launched near-tangent to the
    // boundary, flagged when they exit the region and later re-enter.
    const int grazing_trials = n_samples;
    for (int trial = 0; trial < grazing_trials; ++trial) {
        const std::size_t i = pick(rng);
        const std::size_t j = (i + 1) % boundary.size();
        const auto start = pull_inside(boundary[i]);
        if (!start)
            continue;
        Vec dir = boundary[j].x - boundary[i].x;
        if (dir.norm() <= 0.0)
            continue;
        dir.normalize();
        ++report.samples_checked;

        const GeodesicRecord rec = integrate_null_geodesic(
            chart, *start, null_velocity(chart, *start, dir), horizon, horizon / 2048.0);
        bool was_outside = false, violated = false;
        for (int k = 0; k < rec.samples(); ++k) {
            const bool in = region.inside(rec.z[k]);
            if (!in)
                was_outside = true;
            else if (was_outside) {
                violated = true;
                break;
            }
        }
        if (violated)
            ++report.grazing_violations;
    }
    return report;
}

} // namespace fermat
