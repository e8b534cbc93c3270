// Tests for the arrival-time shortening flow: start hints, config resolution,
// the local Fermat minimizer, the flow itself, guards, and convexity probes.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fermat/shortening.hpp"

#include "support.hpp"

#include <cmath>

using namespace fermat;

namespace {

Event origin2(double t = 0.0) {
    Vec x = Vec::Zero(2);
    return Event(x, t);
}

ObserverCurve observer_at(double x0, double x1) {
    ObserverCurve obs;
    obs.x_obs = Vec(2);
    obs.x_obs << x0, x1;
    return obs;
}

RegionSpec annulus_region(double r_in, double r_out, int samples_per_circle) {
    RegionSpec region;
    region.inside = [r_in, r_out](const Event& z) {
        const double r = z.x.norm();
        return r > r_in && r < r_out;
    };
    region.description = "annulus";
    for (int ring = 0; ring < 2; ++ring) {
        const double r = ring == 0 ? r_in : r_out;
        for (int k = 0; k < samples_per_circle; ++k) {
            const double a = 2.0 * M_PI * k / samples_per_circle;
            Vec x(2);
            x << r * std::cos(a), r * std::sin(a);
            region.boundary_samples.push_back(Event(x, 0.0));
        }
    }
    return region;
}

RegionSpec ball_region(double radius, int samples) {
    RegionSpec region;
    region.inside = [radius](const Event& z) { return z.x.norm() < radius; };
    region.description = "ball";
    for (int k = 0; k < samples; ++k) {
        const double a = 2.0 * M_PI * k / samples;
        Vec x(2);
        x << radius * std::cos(a), radius * std::sin(a);
        region.boundary_samples.push_back(Event(x, 0.0));
    }
    return region;
}

} // namespace

TEST_CASE("hint_path: straight and via reproduce the requested knot sequences") {
    const Event p = origin2();
    const ObserverCurve obs = observer_at(1.0, 0.0);

    StartHint straight;
    const SpatialPolyline sp = hint_path(p, obs, straight);
    REQUIRE(sp.knots.size() == 2u);
    CHECK(sp.knots.front() == p.x);
    CHECK(sp.knots.back() == obs.x_obs);

    StartHint via;
    via.kind = "via";
    Vec w1(2), w2(2);
    w1 << 0.3, 0.2;
    w2 << 0.7, -0.1;
    via.waypoints = {w1, w2};
    const SpatialPolyline vp = hint_path(p, obs, via);
    REQUIRE(vp.knots.size() == 4u);
    CHECK(vp.knots[1] == w1);
    CHECK(vp.knots[2] == w2);
}

TEST_CASE("hint_path: side hint bows the chord along the left normal") {
    const Event p = origin2();
    const ObserverCurve obs = observer_at(1.0, 0.0);

    StartHint side;
    side.kind = "side";
    side.offset = 0.25;
    const SpatialPolyline sp = hint_path(p, obs, side);
    REQUIRE(sp.knots.size() == 3u);
    // Chord (1,0): the left normal is (0,1), so the midpoint moves to (0.5, 0.25).
    CHECK(sp.knots[1](0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(sp.knots[1](1) == doctest::Approx(0.25).epsilon(1e-15));

    side.offset = -0.25;
    const SpatialPolyline sn = hint_path(p, obs, side);
    CHECK(sn.knots[1](1) == doctest::Approx(-0.25).epsilon(1e-15));
}

TEST_CASE("hint_path: winding hint spirals around the origin") {
    Vec px(2), ox(2);
    px << 1.0, 0.0;
    ox << -1.0, 0.0;
    const Event p(px, 0.0);
    ObserverCurve obs;
    obs.x_obs = ox;

    StartHint wind;
    wind.kind = "winding";
    wind.winding = 1;
    const SpatialPolyline sp = hint_path(p, obs, wind);
    // 8*|n|+4 interpolation steps produce steps+1 knots.
    CHECK(sp.knots.size() == 13u);
    CHECK(sp.knots.front() == px);
    CHECK(sp.knots.back() == ox);
    // Both endpoints sit at radius one, so every spiral knot does too.
    for (const Vec& k : sp.knots)
        CHECK(k.norm() == doctest::Approx(1.0).epsilon(1e-12));
    // A single extra turn sweeps the angle monotonically through 3*pi in total;
    // successive knots must therefore advance by roughly 3*pi/12 each.
    double prev = std::atan2(sp.knots[0](1), sp.knots[0](0));
    double total = 0.0;
    for (std::size_t i = 1; i < sp.knots.size(); ++i) {
        double a = std::atan2(sp.knots[i](1), sp.knots[i](0));
        double d = a - prev;
        while (d <= -M_PI) d += 2.0 * M_PI;
        while (d > M_PI) d -= 2.0 * M_PI;
        total += d;
        prev = a;
    }
    CHECK(total == doctest::Approx(3.0 * M_PI).epsilon(1e-9));
}

TEST_CASE("hint_path: degenerate hints are rejected with validation errors") {
    const Event p = origin2();
    const ObserverCurve obs = observer_at(1.0, 0.0);

    StartHint wind;
    wind.kind = "winding";
    wind.winding = 1;
    // Source at the spatial origin: the polar angle is undefined there.
    CHECK_THROWS_AS(hint_path(p, obs, wind), Error);
    try {
        hint_path(p, obs, wind);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Validation);
    }

    StartHint unknown;
    unknown.kind = "zigzag";
    CHECK_THROWS_AS(hint_path(p, obs, unknown), Error);

    // One spatial dimension: no sideways normal exists.
    Vec p1(1), o1(1);
    p1 << 0.0;
    o1 << 1.0;
    ObserverCurve obs1;
    obs1.x_obs = o1;
    StartHint side;
    side.kind = "side";
    side.offset = 0.1;
    CHECK_THROWS_AS(hint_path(Event(p1, 0.0), obs1, side), Error);
}

TEST_CASE("resolve_config fills the trust radius and length cap from the chord") {
    const SplittingChart chart = catalog("minkowski");
    const Event p = origin2();
    const ObserverCurve obs = observer_at(1.0, 0.0);

    ShorteningConfig cfg;
    cfg = resolve_config(chart, p, obs, cfg);
    // A unit chord: trust radius one fifth of it doubled, cap twenty times the
    // lifted straight length sqrt(2) (null line through flat space).
    CHECK(cfg.rho_star == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(cfg.d_cap == doctest::Approx(20.0 * std::sqrt(2.0)).epsilon(1e-9));

    ShorteningConfig manual;
    manual.rho_star = 0.7;
    manual.d_cap = 5.0;
    manual = resolve_config(chart, p, obs, manual);
    CHECK(manual.rho_star == 0.7);
    CHECK(manual.d_cap == 5.0);
}

TEST_CASE("local_fermat_minimizer solves the flat piece by Newton shooting") {
    const SplittingChart chart = catalog("minkowski");
    ShorteningConfig cfg;
    cfg = resolve_config(chart, origin2(), observer_at(1.0, 0.0), cfg);

    Vec target(2);
    target << 1.0, 0.0;
    const LocalMinResult lm = local_fermat_minimizer(chart, origin2(), target, cfg, 1.0);
    CHECK(lm.newton_converged);
    CHECK_FALSE(lm.used_fallback);
    // Flat space: light covers a unit chord in unit coordinate time.
    CHECK(lm.arrival == doctest::Approx(1.0).epsilon(1e-8));
    CHECK((lm.curve.path.knots.front() - origin2().x).norm() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK((lm.curve.path.knots.back() - target).norm() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("local_fermat_minimizer snaps coincident endpoints to a zero-time piece") {
    const SplittingChart chart = catalog("minkowski");
    ShorteningConfig cfg;
    const Event q(Vec::Ones(2) * 0.3, 1.5);
    const LocalMinResult lm = local_fermat_minimizer(chart, q, q.x, cfg, 1.0);
    CHECK(lm.newton_converged);
    // A constant piece elapses exactly zero time.
    CHECK(lm.arrival == q.t);
}

TEST_CASE("run_shortening holds a straight flat ray fixed and polishes it") {
    const SplittingChart chart = catalog("minkowski");
    const Event p = origin2();
    const ObserverCurve obs = observer_at(1.0, 0.0);
    RegionSpec region;

    SpatialPolyline straight;
    straight.knots = {p.x, obs.x_obs};
    const LiftResult lifted = lift_time(chart, straight, p.t);
    REQUIRE_FALSE(lifted.left_domain);

    ShorteningConfig cfg;
    cfg.n_segments = 8;
    cfg.max_rounds = 200;
    const ShorteningResult res = run_shortening(chart, lifted.curve, p, obs, region, cfg);

    CHECK(res.stop == StopReason::Converged);
    CHECK(res.final_junction_angle < cfg.junction_tol);
    REQUIRE(res.refined.has_value());
    CHECK(res.refined->converged);
    CHECK(res.refined->arrival_time == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(res.refined->endpoint_miss < 1e-8);
    for (std::size_t i = 1; i < res.tau_history.size(); ++i)
        CHECK(res.tau_history[i] <= res.tau_history[i - 1] + 1e-15);
}

TEST_CASE("run_shortening straightens random zig-zags monotonically") {
    const SplittingChart chart = catalog("minkowski");
    const Event p = origin2();
    const ObserverCurve obs = observer_at(1.0, 0.0);
    RegionSpec region;

    auto gen = testsupport::rng(404);
    for (int trial = 0; trial < 3; ++trial) {
        const SpatialPolyline zig =
            testsupport::random_zigzag(gen, p.x, obs.x_obs, 6, 0.1);
        const LiftResult lifted = lift_time(chart, zig, p.t);
        REQUIRE_FALSE(lifted.left_domain);

        ShorteningConfig cfg;
        cfg.n_segments = 8;
        cfg.max_rounds = 300;
        const ShorteningResult res = run_shortening(chart, lifted.curve, p, obs, region, cfg);

        CHECK(res.stop == StopReason::Converged);
        for (std::size_t i = 1; i < res.tau_history.size(); ++i)
            CHECK(res.tau_history[i] <= res.tau_history[i - 1] + 1e-15);
        REQUIRE(res.refined.has_value());
        // Flat space has a single ray: the straight chord with unit arrival.
        CHECK(res.refined->arrival_time == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("run_shortening rejects curves that start away from the source") {
    const SplittingChart chart = catalog("minkowski");
    const Event p = origin2();
    const ObserverCurve obs = observer_at(1.0, 0.0);
    RegionSpec region;

    SpatialPolyline wrong;
    Vec off(2);
    off << 0.2, 0.0;
    wrong.knots = {off, obs.x_obs};
    const LiftResult lifted = lift_time(chart, wrong, 0.0);
    ShorteningConfig cfg;
    CHECK_THROWS_AS(run_shortening(chart, lifted.curve, p, obs, region, cfg), Error);
}

TEST_CASE("run_shortening stops with LeftRegion when nodes escape the region") {
    const SplittingChart chart = catalog("minkowski");
    const Event p = origin2();
    const ObserverCurve obs = observer_at(1.0, 0.0);

    RegionSpec half;
    half.inside = [](const Event& z) { return z.x(1) > -0.1; };
    half.description = "upper half";

    // A detour dipping to y = -0.5 starts with nodes outside the region.
    SpatialPolyline dip;
    Vec mid(2);
    mid << 0.5, -0.5;
    dip.knots = {p.x, mid, obs.x_obs};
    const LiftResult lifted = lift_time(chart, dip, p.t);
    REQUIRE_FALSE(lifted.left_domain);

    ShorteningConfig cfg;
    cfg.n_segments = 8;
    const ShorteningResult res = run_shortening(chart, lifted.curve, p, obs, half, cfg);
    CHECK(res.stop == StopReason::LeftRegion);
    CHECK_FALSE(res.refined.has_value());
    CHECK_FALSE(res.note.empty());
}

TEST_CASE("run_shortening aborts when the length cap is exceeded") {
    const SplittingChart chart = catalog("minkowski");
    const Event p = origin2();
    const ObserverCurve obs = observer_at(1.0, 0.0);
    RegionSpec region;

    SpatialPolyline straight;
    straight.knots = {p.x, obs.x_obs};
    const LiftResult lifted = lift_time(chart, straight, p.t);

    ShorteningConfig cfg;
    cfg.d_cap = 0.1; // far below the lifted straight length sqrt(2)
    const ShorteningResult res = run_shortening(chart, lifted.curve, p, obs, region, cfg);
    CHECK(res.stop == StopReason::LengthCapExceeded);
}

TEST_CASE("multi_start lifts every admissible hint and drops escaping ones") {
    // A slab chart: flat metric restricted to |y| < 0.2.
    SplittingChart slab = catalog("minkowski");
    slab.in_domain = [](const Vec& x, double) { return std::abs(x(1)) < 0.2; };

    const Event p = origin2();
    const ObserverCurve obs = observer_at(1.0, 0.0);
    ShorteningConfig cfg;
    cfg = resolve_config(slab, p, obs, cfg);

    StartHint straight;
    StartHint via;
    via.kind = "via";
    Vec w(2);
    w << 0.5, 0.1;
    via.waypoints = {w};
    StartHint side;
    side.kind = "side";
    side.offset = 0.5; // bows out to y = 0.5, outside the slab

    const std::vector<LiftedPolyline> starts =
        multi_start(slab, p, obs, {straight, via, side}, cfg);
    REQUIRE(starts.size() == 2u);
    CHECK(starts[0].arrival_time() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(starts[1].arrival_time() > 1.0);
}

TEST_CASE("light-convexity probe flags an annulus and clears a round ball") {
    const SplittingChart chart = catalog("minkowski");

    const RegionSpec annulus = annulus_region(0.35, 1.55, 48);
    const ConvexityReport hole = check_light_convexity(chart, annulus, 24, 0.2, 7);
    CHECK(hole.samples_checked > 0);
    // Chords between inner-rim points cut across the excluded disk.
    CHECK(hole.violations() >= 1);

    const RegionSpec ball = ball_region(1.0, 48);
    const ConvexityReport convex = check_light_convexity(chart, ball, 24, 0.2, 7);
    CHECK(convex.samples_checked > 0);
    CHECK(convex.violations() == 0);
}

TEST_CASE("light-convexity probe degrades gracefully without boundary samples") {
    const SplittingChart chart = catalog("minkowski");
    RegionSpec bare;
    const ConvexityReport rep = check_light_convexity(chart, bare, 16, 0.2, 1);
    CHECK(rep.samples_checked == 0);
    CHECK(rep.violations() == 0);
}
