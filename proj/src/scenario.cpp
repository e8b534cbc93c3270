#include "fermat/scenario.hpp"

#include "json.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace fermat {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

void expect_keys(const json& obj, const std::set<std::string>& allowed,
                 const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw Error(ErrorCode::Parse, "unknown key '" + it.key() + "' in " + where);
}

Vec as_vec(const json& arr, const std::string& where) {
    if (!arr.is_array() || arr.empty())
        throw Error(ErrorCode::Parse, where + " must be a nonempty array of numbers");
    Vec v(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) {
        if (!arr[i].is_number())
            throw Error(ErrorCode::Parse, where + " must contain only numbers");
        v(static_cast<int>(i)) = arr[i].get<double>();
    }
    return v;
}

double num(const json& obj, const char* key, double fallback) {
    auto it = obj.find(key);
    if (it == obj.end())
        return fallback;
    if (!it->is_number())
        throw Error(ErrorCode::Parse, std::string("'") + key + "' must be a number");
    return it->get<double>();
}

int integer(const json& obj, const char* key, int fallback) {
    auto it = obj.find(key);
    if (it == obj.end())
        return fallback;
    if (!it->is_number_integer())
        throw Error(ErrorCode::Parse, std::string("'") + key + "' must be an integer");
    return it->get<int>();
}

bool boolean(const json& obj, const char* key, bool fallback) {
    auto it = obj.find(key);
    if (it == obj.end())
        return fallback;
    if (!it->is_boolean())
        throw Error(ErrorCode::Parse, std::string("'") + key + "' must be a boolean");
    return it->get<bool>();
}

void parse_chart(const json& j, Scenario* sc) {
    expect_keys(j, {"name", "params", "grid"}, "chart");
    if (j.contains("grid")) {
        if (j.contains("name") || j.contains("params"))
            throw Error(ErrorCode::Parse, "chart must be either a catalog entry or a grid, not both");
        const json& g = j["grid"];
        expect_keys(g, {"axes", "alpha", "delta"}, "chart.grid");
        sc->chart_is_grid = true;
        for (const json& axis : g.at("axes")) {
            std::vector<double> coords;
            for (const json& c : axis)
                coords.push_back(c.get<double>());
            sc->grid_axes.push_back(coords);
        }
        const int n = static_cast<int>(sc->grid_axes.size());
        for (const json& entry : g.at("alpha")) {
            const Vec flat = as_vec(entry, "chart.grid.alpha entry");
            if (flat.size() != n * n)
                throw Error(ErrorCode::Parse, "grid alpha entries must have (dim-1)^2 values");
            Mat a(n, n);
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c)
                    a(r, c) = flat(r * n + c);
            sc->grid_alpha.push_back(a);
        }
        for (const json& entry : g.at("delta"))
            sc->grid_delta.push_back(as_vec(entry, "chart.grid.delta entry"));
        sc->chart_name = "grid";
        return;
    }
    if (!j.contains("name"))
        throw Error(ErrorCode::Parse, "chart needs a catalog 'name' or an inline 'grid'");
    sc->chart_name = j["name"].get<std::string>();
    if (j.contains("params")) {
        for (auto it = j["params"].begin(); it != j["params"].end(); ++it)
            sc->chart_params[it.key()] = it->get<double>();
    }
}

void parse_region(const json& j, Scenario* sc) {
    expect_keys(j, {"kind", "center", "radius", "inner", "outer", "min", "max"}, "region");
    sc->region_kind = j.value("kind", std::string("all"));
    if (sc->region_kind == "all")
        return;
    if (sc->region_kind == "ball") {
        sc->region_center = as_vec(j.at("center"), "region.center");
        sc->region_radius = j.at("radius").get<double>();
        return;
    }
    if (sc->region_kind == "annulus") {
        sc->region_center = as_vec(j.at("center"), "region.center");
        sc->region_inner = j.at("inner").get<double>();
        sc->region_outer = j.at("outer").get<double>();
        if (sc->region_inner >= sc->region_outer)
            throw Error(ErrorCode::Parse, "annulus needs inner < outer");
        return;
    }
    if (sc->region_kind == "box") {
        sc->region_min = as_vec(j.at("min"), "region.min");
        sc->region_max = as_vec(j.at("max"), "region.max");
        return;
    }
    throw Error(ErrorCode::Parse, "unknown region kind '" + sc->region_kind + "'");
}

void parse_flow(const json& j, ShorteningConfig* cfg) {
    expect_keys(j,
                {"n_segments", "tau_tol", "junction_tol", "rho_star", "d_cap",
                 "max_rounds", "local_min_grid", "local_newton_iters",
                 "flow_steps_per_segment", "rk_step", "snap_tol"},
                "flow");
    cfg->n_segments = integer(j, "n_segments", cfg->n_segments);
    cfg->tau_tol = num(j, "tau_tol", cfg->tau_tol);
    cfg->junction_tol = num(j, "junction_tol", cfg->junction_tol);
    cfg->rho_star = num(j, "rho_star", cfg->rho_star);
    cfg->d_cap = num(j, "d_cap", cfg->d_cap);
    cfg->max_rounds = integer(j, "max_rounds", cfg->max_rounds);
    cfg->local_min_grid = integer(j, "local_min_grid", cfg->local_min_grid);
    cfg->local_newton_iters = integer(j, "local_newton_iters", cfg->local_newton_iters);
    cfg->flow_steps_per_segment = integer(j, "flow_steps_per_segment", cfg->flow_steps_per_segment);
    cfg->rk_step = num(j, "rk_step", cfg->rk_step);
    cfg->snap_tol = num(j, "snap_tol", cfg->snap_tol);
    if (cfg->n_segments < 2 || cfg->max_rounds < 1 || cfg->tau_tol <= 0.0 ||
        cfg->rk_step <= 0.0 || cfg->flow_steps_per_segment < 4)
        throw Error(ErrorCode::Parse, "flow configuration values are out of range");
}

StartHint parse_start(const json& j) {
    expect_keys(j, {"kind", "waypoints", "side", "offset", "turns"}, "starts entry");
    StartHint hint;
    hint.kind = j.value("kind", std::string("straight"));
    if (hint.kind == "straight") {
        hint.label = "straight";
        return hint;
    }
    if (hint.kind == "via") {
        for (const json& w : j.at("waypoints"))
            hint.waypoints.push_back(as_vec(w, "start waypoint"));
        hint.label = "via:" + std::to_string(hint.waypoints.size());
        return hint;
    }
    if (hint.kind == "side") {
        const std::string side = j.value("side", std::string("left"));
        const double off = std::abs(num(j, "offset", 1.0));
        if (side != "left" && side != "right")
            throw Error(ErrorCode::Parse, "start side must be 'left' or 'right'");
        hint.offset = side == "left" ? off : -off;
        std::ostringstream label;
        label << "side:" << side << ":" << off;
        hint.label = label.str();
        return hint;
    }
    if (hint.kind == "winding") {
        hint.winding = integer(j, "turns", 1);
        hint.label = "winding:" + std::to_string(hint.winding);
        return hint;
    }
    throw Error(ErrorCode::Parse, "unknown start kind '" + hint.kind + "'");
}

} // namespace

namespace {

Scenario parse_scenario_impl(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::Parse, std::string("scenario is not valid JSON: ") + e.what());
    }
    expect_keys(root,
                {"chart", "source", "observer", "region", "flow", "starts",
                 "topology", "tolerances", "seed", "past", "hessian_modes",
                 "convexity"},
                "scenario");

    Scenario sc;
    parse_chart(root.at("chart"), &sc);

    const json& src = root.at("source");
    expect_keys(src, {"x", "t"}, "source");
    sc.p = Event(as_vec(src.at("x"), "source.x"), num(src, "t", 0.0));

    const json& obs = root.at("observer");
    expect_keys(obs, {"x", "t_range"}, "observer");
    sc.observer.x_obs = as_vec(obs.at("x"), "observer.x");
    if (obs.contains("t_range")) {
        const json& tr = obs["t_range"];
        if (!tr.is_array() || tr.size() != 2)
            throw Error(ErrorCode::Parse, "observer.t_range must be [min, max] (null = unbounded)");
        if (!tr[0].is_null())
            sc.observer.t_min = tr[0].get<double>();
        if (!tr[1].is_null())
            sc.observer.t_max = tr[1].get<double>();
    }

    if (root.contains("region"))
        parse_region(root["region"], &sc);
    if (root.contains("flow"))
        parse_flow(root["flow"], &sc.config);
    if (root.contains("starts")) {
        for (const json& s : root["starts"])
            sc.starts.push_back(parse_start(s));
    }
    if (sc.starts.empty())
        sc.starts.push_back(StartHint{});

    if (root.contains("topology")) {
        const json& topo = root["topology"];
        expect_keys(topo, {"contractible", "infinite_betti", "betti"}, "topology");
        sc.contractible = boolean(topo, "contractible", true);
        sc.infinite_betti = boolean(topo, "infinite_betti", false);
        if (topo.contains("betti"))
            for (const json& b : topo["betti"])
                sc.betti_override.push_back(b.get<int>());
    }

    if (root.contains("tolerances")) {
        const json& tol = root["tolerances"];
        expect_keys(tol, {"svd_tol", "inertia_tol", "dedup_radius", "parity_policy"}, "tolerances");
        sc.svd_tol = num(tol, "svd_tol", sc.svd_tol);
        sc.inertia_tol = num(tol, "inertia_tol", sc.inertia_tol);
        sc.dedup_radius = num(tol, "dedup_radius", sc.dedup_radius);
        sc.parity_policy = tol.value("parity_policy", sc.parity_policy);
        if (sc.parity_policy != "warn" && sc.parity_policy != "fail")
            throw Error(ErrorCode::Parse, "parity_policy must be 'warn' or 'fail'");
    }

    if (root.contains("seed"))
        sc.seed = root["seed"].get<std::uint64_t>();
    sc.past = boolean(root, "past", false);
    sc.hessian_modes = integer(root, "hessian_modes", 0);

    if (root.contains("convexity")) {
        const json& cx = root["convexity"];
        expect_keys(cx, {"check", "samples", "horizon"}, "convexity");
        sc.check_convexity = boolean(cx, "check", true);
        sc.convexity_samples = integer(cx, "samples", sc.convexity_samples);
        sc.convexity_horizon = num(cx, "horizon", sc.convexity_horizon);
    }
    return sc;
}

} // namespace

Scenario parse_scenario(const std::string& json_text) {
    try {
        return parse_scenario_impl(json_text);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Parse, std::string("malformed scenario: ") + e.what());
    }
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::Io, "cannot open scenario file '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    Scenario sc = parse_scenario(buffer.str());
    sc.source_path = path;
    return sc;
}

SplittingChart build_chart(const Scenario& sc) {
    SplittingChart chart = sc.chart_is_grid
                               ? grid_chart(sc.grid_axes, sc.grid_alpha, sc.grid_delta)
                               : catalog(sc.chart_name, sc.chart_params);
    return sc.past ? time_reflect(chart) : chart;
}

RegionSpec build_region(const Scenario& sc, const SplittingChart& chart) {
    RegionSpec region;
    const int n = chart.sdim();
    if (sc.region_kind == "all") {
        region.description = "all";
        return region;
    }
    // Boundary samples (for the convexity probe) are generated in the leading
    // coordinate plane; higher-dimensional charts keep the membership test
    // but get no automatic boundary sampling.
    auto planar = [n](const Vec& base, double r, double ang) {
        Vec x = base;
        x(0) += r * std::cos(ang);
        if (n >= 2)
            x(1) += r * std::sin(ang);
        return x;
    };
    if (sc.region_kind == "ball") {
        const Vec c = sc.region_center;
        const double r = sc.region_radius;
        if (c.size() != n)
            throw Error(ErrorCode::Validation, "region center dimension does not match the chart");
        region.inside = [c, r](const Event& z) { return (z.x - c).norm() <= r; };
        region.description = "ball";
        if (n == 2)
            for (int k = 0; k < 128; ++k)
                region.boundary_samples.emplace_back(planar(c, r, 2.0 * M_PI * k / 128), 0.0);
        return region;
    }
    if (sc.region_kind == "annulus") {
        const Vec c = sc.region_center;
        const double a = sc.region_inner, b = sc.region_outer;
        if (c.size() != n)
            throw Error(ErrorCode::Validation, "region center dimension does not match the chart");
        region.inside = [c, a, b](const Event& z) {
            const double r = (z.x - c).norm();
            return r >= a && r <= b;
        };
        region.description = "annulus";
        if (n == 2) {
            for (int k = 0; k < 128; ++k)
                region.boundary_samples.emplace_back(planar(c, a, 2.0 * M_PI * k / 128), 0.0);
            for (int k = 0; k < 128; ++k)
                region.boundary_samples.emplace_back(planar(c, b, 2.0 * M_PI * k / 128), 0.0);
        }
        return region;
    }
    if (sc.region_kind == "box") {
        const Vec lo = sc.region_min, hi = sc.region_max;
        if (lo.size() != n || hi.size() != n)
            throw Error(ErrorCode::Validation, "region box dimensions do not match the chart");
        region.inside = [lo, hi](const Event& z) {
            for (int d = 0; d < z.x.size(); ++d)
                if (z.x(d) < lo(d) || z.x(d) > hi(d))
                    return false;
            return true;
        };
        region.description = "box";
        if (n == 2) {
            const int per_side = 32;
            auto corner = [&](double x0, double x1) {
                Vec x(2);
                x << x0, x1;
                return x;
            };
            for (int k = 0; k < per_side; ++k) {
                const double w = k / static_cast<double>(per_side);
                region.boundary_samples.emplace_back(
                    corner(lo(0) + w * (hi(0) - lo(0)), lo(1)), 0.0);
            }
            for (int k = 0; k < per_side; ++k) {
                const double w = k / static_cast<double>(per_side);
                region.boundary_samples.emplace_back(
                    corner(hi(0), lo(1) + w * (hi(1) - lo(1))), 0.0);
            }
            for (int k = 0; k < per_side; ++k) {
                const double w = k / static_cast<double>(per_side);
                region.boundary_samples.emplace_back(
                    corner(hi(0) - w * (hi(0) - lo(0)), hi(1)), 0.0);
            }
            for (int k = 0; k < per_side; ++k) {
                const double w = k / static_cast<double>(per_side);
                region.boundary_samples.emplace_back(
                    corner(lo(0), hi(1) - w * (hi(1) - lo(1))), 0.0);
            }
        }
        return region;
    }
    throw Error(ErrorCode::Validation, "unknown region kind '" + sc.region_kind + "'");
}

namespace {

ordered_json vec_json(const Vec& v) {
    ordered_json arr = ordered_json::array();
    for (int i = 0; i < v.size(); ++i)
        arr.push_back(v(i));
    return arr;
}

} // namespace

std::string canonical_dump(const Scenario& sc) {
    ordered_json j;
    if (sc.chart_is_grid) {
        ordered_json axes = ordered_json::array();
        for (const auto& axis : sc.grid_axes)
            axes.push_back(axis);
        ordered_json alpha = ordered_json::array();
        for (const Mat& a : sc.grid_alpha) {
            ordered_json flat = ordered_json::array();
            for (int r = 0; r < a.rows(); ++r)
                for (int c = 0; c < a.cols(); ++c)
                    flat.push_back(a(r, c));
            alpha.push_back(flat);
        }
        ordered_json delta = ordered_json::array();
        for (const Vec& d : sc.grid_delta)
            delta.push_back(vec_json(d));
        j["chart"] = {{"grid", {{"axes", axes}, {"alpha", alpha}, {"delta", delta}}}};
    } else {
        ordered_json params = ordered_json::object();
        for (const auto& [key, value] : sc.chart_params)
            params[key] = value;
        j["chart"] = {{"name", sc.chart_name}, {"params", params}};
    }
    j["source"] = {{"x", vec_json(sc.p.x)}, {"t", sc.p.t}};
    ordered_json t_range = ordered_json::array();
    t_range.push_back(std::isfinite(sc.observer.t_min) ? ordered_json(sc.observer.t_min)
                                                       : ordered_json(nullptr));
    t_range.push_back(std::isfinite(sc.observer.t_max) ? ordered_json(sc.observer.t_max)
                                                       : ordered_json(nullptr));
    j["observer"] = {{"x", vec_json(sc.observer.x_obs)}, {"t_range", t_range}};

    ordered_json region = {{"kind", sc.region_kind}};
    if (sc.region_kind == "ball") {
        region["center"] = vec_json(sc.region_center);
        region["radius"] = sc.region_radius;
    } else if (sc.region_kind == "annulus") {
        region["center"] = vec_json(sc.region_center);
        region["inner"] = sc.region_inner;
        region["outer"] = sc.region_outer;
    } else if (sc.region_kind == "box") {
        region["min"] = vec_json(sc.region_min);
        region["max"] = vec_json(sc.region_max);
    }
    j["region"] = region;

    // The echo carries the *resolved* tuning values so the hash pins down
    // exactly what the run used, including the automatic choices.
    const SplittingChart chart = build_chart(sc);
    Event p = sc.p;
    ObserverCurve obs = sc.observer;
    if (sc.past) {
        p.t = -sc.p.t;
        obs.t_min = -sc.observer.t_max;
        obs.t_max = -sc.observer.t_min;
    }
    const ShorteningConfig cfg = resolve_config(chart, p, obs, sc.config);
    j["flow"] = {{"n_segments", cfg.n_segments},
                 {"tau_tol", cfg.tau_tol},
                 {"junction_tol", cfg.junction_tol},
                 {"rho_star", cfg.rho_star},
                 {"d_cap", cfg.d_cap},
                 {"max_rounds", cfg.max_rounds},
                 {"local_min_grid", cfg.local_min_grid},
                 {"local_newton_iters", cfg.local_newton_iters},
                 {"flow_steps_per_segment", cfg.flow_steps_per_segment},
                 {"rk_step", cfg.rk_step},
                 {"snap_tol", cfg.snap_tol}};

    ordered_json starts = ordered_json::array();
    for (const StartHint& hint : sc.starts) {
        ordered_json s = {{"kind", hint.kind}};
        if (hint.kind == "via") {
            ordered_json w = ordered_json::array();
            for (const Vec& wp : hint.waypoints)
                w.push_back(vec_json(wp));
            s["waypoints"] = w;
        } else if (hint.kind == "side") {
            s["side"] = hint.offset >= 0.0 ? "left" : "right";
            s["offset"] = std::abs(hint.offset);
        } else if (hint.kind == "winding") {
            s["turns"] = hint.winding;
        }
        starts.push_back(s);
    }
    j["starts"] = starts;

    j["topology"] = {{"contractible", sc.contractible},
                     {"infinite_betti", sc.infinite_betti},
                     {"betti", sc.betti_override}};
    j["tolerances"] = {{"svd_tol", sc.svd_tol},
                       {"inertia_tol", sc.inertia_tol},
                       {"dedup_radius", sc.dedup_radius},
                       {"parity_policy", sc.parity_policy}};
    j["seed"] = sc.seed;
    j["past"] = sc.past;
    j["hessian_modes"] = sc.hessian_modes;
    j["convexity"] = {{"check", sc.check_convexity},
                      {"samples", sc.convexity_samples},
                      {"horizon", sc.convexity_horizon}};
    return j.dump();
}

std::uint64_t scenario_hash(const Scenario& sc) {
    // FNV-1a over the canonical dump.
    const std::string dump = canonical_dump(sc);
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

namespace {

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
    }
};

// Undo the time reflection on a recorded ray so past-directed results are
// reported in the scenario's own coordinates.
GeodesicRecord reflect_record(const GeodesicRecord& rec) {
    GeodesicRecord out = rec;
    for (Event& z : out.z)
        z.t = -z.t;
    for (Vec& v : out.v)
        v(v.size() - 1) = -v(v.size() - 1);
    return out;
}

} // namespace

RunReport run(const Scenario& sc) {
    RunReport report;
    report.scenario = sc;
    Timer total;

    const SplittingChart chart = build_chart(sc);
    Event p = sc.p;
    ObserverCurve obs = sc.observer;
    if (sc.past) {
        // Search in the time-reflected chart, where the past rays of the
        // original problem are the future rays of the reflected one.
        p.t = -sc.p.t;
        obs.t_min = -sc.observer.t_max;
        obs.t_max = -sc.observer.t_min;
    }
    const RegionSpec region = build_region(sc, chart);
    validate_problem(chart, p, obs, region);
    const ShorteningConfig cfg = resolve_config(chart, p, obs, sc.config);
    const double chord = (obs.x_obs - p.x).norm();
    const double dedup = sc.dedup_radius > 0.0 ? sc.dedup_radius : 1e-3 * (1.0 + chord);

    struct Candidate {
        RayResult ray;
        Vec direction;
    };
    std::vector<Candidate> found;

    for (std::size_t k = 0; k < sc.starts.size(); ++k) {
        const StartHint& hint = sc.starts[k];
        Timer timer;
        SpatialPolyline seed;
        try {
            seed = hint_path(p, obs, hint);
        } catch (const Error& e) {
            report.notes.push_back("start '" + hint.label + "' rejected: " + e.what());
            continue;
        }
        const LiftResult lifted = lift_time(chart, seed, p.t, cfg.flow_steps_per_segment);
        if (lifted.left_domain) {
            report.notes.push_back("start '" + hint.label + "' leaves the chart domain; skipped");
            continue;
        }

        ShorteningResult flow;
        try {
            flow = run_shortening(chart, lifted.curve, p, obs, region, cfg);
        } catch (const Error& e) {
            report.notes.push_back("start '" + hint.label + "' failed: " + e.what());
            report.guard_abort = true;
            continue;
        }
        report.timings_ms["start_" + hint.label] = timer.ms();

        if (flow.stop == StopReason::LeftRegion || flow.stop == StopReason::LengthCapExceeded) {
            report.guard_abort = true;
            report.notes.push_back("start '" + hint.label + "' aborted: " + flow.note);
            continue;
        }
        if (flow.stop == StopReason::MaxRounds) {
            std::ostringstream msg;
            msg << "start '" << hint.label << "' did not converge in " << flow.rounds
                << " rounds (last arrival " << (flow.tau_history.empty() ? 0.0 : flow.tau_history.back())
                << ")";
            report.notes.push_back(msg.str());
            continue;
        }
        if (!flow.refined || !flow.refined->converged) {
            report.notes.push_back("start '" + hint.label + "': " + flow.note);
            continue;
        }

        const RefineResult& refined = *flow.refined;
        if (!obs.contains_time(refined.arrival_time)) {
            report.notes.push_back("start '" + hint.label +
                                   "' arrives outside the observer's parameter interval; skipped");
            continue;
        }

        Candidate cand;
        cand.direction = refined.geodesic.v.front();
        cand.ray.tau = refined.arrival_time;
        cand.ray.endpoint_miss = refined.endpoint_miss;
        cand.ray.start_hint = hint.label;
        cand.ray.geodesic = refined.geodesic;
        cand.ray.residual = geodesic_residual(chart, refined.geodesic);

        const ConjugateScan scan = conjugate_points(chart, refined.geodesic, sc.svd_tol);
        cand.ray.index = scan.geometric_index;
        cand.ray.nondegenerate = !scan.endpoint_conjugate;
        cand.ray.conjugate_points = scan.points;
        if (scan.multiplicity_clamped)
            cand.ray.warnings.push_back("a conjugate-point multiplicity was clamped to dim-1");
        if (scan.endpoint_conjugate)
            cand.ray.warnings.push_back("arrival endpoint is conjugate: the ray is degenerate");

        if (sc.hessian_modes > 0) {
            try {
                const HessianResult hess = hessian_matrix(chart, refined.geodesic, sc.hessian_modes);
                const InertiaResult inertia = morse_index_numeric(hess, sc.inertia_tol);
                cand.ray.hessian_index = inertia.negative;
                if (inertia.near_zero > 0)
                    cand.ray.warnings.push_back("Hessian inertia is near-degenerate");
                if (inertia.negative != cand.ray.index)
                    cand.ray.warnings.push_back("Hessian index disagrees with the conjugate-point index");
            } catch (const Error& e) {
                cand.ray.warnings.push_back(std::string("Hessian cross-check failed: ") + e.what());
            }
        }
        found.push_back(std::move(cand));
    }

    // Deduplicate: two starts that landed on the same ray agree in arrival
    // time and launch direction.
    std::vector<Candidate> unique;
    for (Candidate& cand : found) {
        bool duplicate = false;
        for (Candidate& kept : unique) {
            const double dir_gap = (cand.direction - kept.direction).norm() /
                                   (1.0 + kept.direction.norm());
            if (std::abs(cand.ray.tau - kept.ray.tau) < dedup * (1.0 + std::abs(kept.ray.tau)) &&
                dir_gap < dedup) {
                kept.ray.start_hint += "," + cand.ray.start_hint;
                duplicate = true;
                break;
            }
        }
        if (!duplicate)
            unique.push_back(std::move(cand));
    }

    for (Candidate& cand : unique) {
        if (sc.past) {
            cand.ray.tau = -cand.ray.tau;
            cand.ray.geodesic = reflect_record(cand.ray.geodesic);
        }
        report.rays.push_back(std::move(cand.ray));
    }
    std::sort(report.rays.begin(), report.rays.end(),
              [](const RayResult& a, const RayResult& b) { return a.tau < b.tau; });
    for (std::size_t i = 0; i < report.rays.size(); ++i)
        report.rays[i].id = static_cast<int>(i);

    // Index audit over the nondegenerate rays.
    std::vector<int> indices;
    bool any_degenerate = false;
    for (const RayResult& ray : report.rays) {
        if (ray.nondegenerate)
            indices.push_back(ray.index);
        else
            any_degenerate = true;
    }
    if (sc.infinite_betti) {
        int largest = 0;
        for (int idx : indices)
            largest = std::max(largest, idx);
        report.series = assemble_series(indices, {});
        std::ostringstream msg;
        msg << "connecting-curve space has unbounded topology: the count relations are "
            << "unverifiable at this scale; largest index found is " << largest;
        report.notes.push_back(msg.str());
        report.relations.consistent = true;
        report.parity.consistent = true;
        report.parity.message = "parity not audited: unbounded topology declared";
    } else {
        std::vector<int> betti = sc.betti_override;
        if (betti.empty()) {
            int degree = 0;
            for (int idx : indices)
                degree = std::max(degree, idx);
            betti = betti_profile(sc.contractible, degree + 2);
        }
        report.series = assemble_series(indices, betti);
        report.relations = check_relations(report.series);
        report.parity = parity_check(static_cast<int>(indices.size()), sc.contractible,
                                     any_degenerate);
        if (!report.relations.consistent)
            report.ledger_violated = true;
        if (!report.parity.consistent && sc.parity_policy == "fail")
            report.ledger_violated = true;
    }

    if (sc.check_convexity) {
        Timer timer;
        const double horizon = sc.convexity_horizon > 0.0 ? sc.convexity_horizon
                                                          : 3.0 * (1.0 + 2.0 * chord);
        report.convexity =
            check_light_convexity(chart, region, sc.convexity_samples, horizon, sc.seed);
        report.convexity_probed = true;
        report.timings_ms["convexity"] = timer.ms();
        if (report.convexity.violations() > 0)
            report.notes.push_back("region failed the light-convexity probe; ray inventory "
                                   "may be incomplete");
    }

    report.timings_ms["total"] = total.ms();
    return report;
}

} // namespace fermat
