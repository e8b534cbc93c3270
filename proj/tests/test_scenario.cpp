// Tests for scenario parsing, canonical hashing, region construction, the
// end-to-end runner, and the deterministic output files.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fermat/scenario.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace fermat;

namespace {

// Minimal flat-space problem: unit chord, one straight start.
std::string mini_json(const std::string& extra = "") {
    std::string base = R"({
      "chart": {"name": "minkowski"},
      "source": {"x": [0.0, 0.0], "t": 0.0},
      "observer": {"x": [1.0, 0.0], "t_range": [null, null]},
      "flow": {"n_segments": 8, "max_rounds": 200})";
    if (!extra.empty())
        base += ",\n" + extra;
    return base + "\n}";
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace

TEST_CASE("parse_scenario fills defaults for a minimal description") {
    const Scenario sc = parse_scenario(mini_json());
    CHECK(sc.chart_name == "minkowski");
    CHECK_FALSE(sc.chart_is_grid);
    CHECK(sc.region_kind == "all");
    CHECK(sc.contractible);
    CHECK_FALSE(sc.past);
    CHECK(sc.hessian_modes == 0);
    CHECK(sc.parity_policy == "warn");
    CHECK(sc.seed == 0u);
    REQUIRE(sc.starts.size() == 1u); // a default straight start is injected
    CHECK(sc.starts[0].kind == "straight");
    CHECK(sc.config.n_segments == 8);
    CHECK(sc.config.max_rounds == 200);
    CHECK(sc.p.t == 0.0);
    CHECK(sc.observer.x_obs(0) == 1.0);
}

TEST_CASE("parse_scenario rejects unknown keys by name") {
    const std::string bad = R"({
      "chart": {"name": "minkowski"},
      "sourc": {"x": [0.0, 0.0], "t": 0.0},
      "observer": {"x": [1.0, 0.0], "t_range": [null, null]}
    })";
    try {
        parse_scenario(bad);
        FAIL("expected a parse error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Parse);
        CHECK(std::string(e.what()).find("sourc") != std::string::npos);
    }
}

TEST_CASE("parse_scenario rejects malformed values with parse errors") {
    CHECK_THROWS_AS(parse_scenario("{not json"), Error);

    // Flow values out of range.
    CHECK_THROWS_AS(parse_scenario(R"({
      "chart": {"name": "minkowski"},
      "source": {"x": [0.0, 0.0], "t": 0.0},
      "observer": {"x": [1.0, 0.0], "t_range": [null, null]},
      "flow": {"n_segments": 1}
    })"),
                    Error);

    // Annulus bounds inverted.
    CHECK_THROWS_AS(parse_scenario(R"({
      "chart": {"name": "minkowski"},
      "source": {"x": [0.0, 0.0], "t": 0.0},
      "observer": {"x": [1.0, 0.0], "t_range": [null, null]},
      "region": {"kind": "annulus", "center": [0.0, 0.0], "inner": 2.0, "outer": 1.0}
    })"),
                    Error);

    // Unknown side keyword in a start hint.
    CHECK_THROWS_AS(parse_scenario(mini_json(
                        R"("starts": [{"kind": "side", "side": "up", "offset": 0.5}])")),
                    Error);

    // Unknown parity policy.
    CHECK_THROWS_AS(parse_scenario(mini_json(
                        R"("tolerances": {"parity_policy": "maybe"})")),
                    Error);
}

TEST_CASE("load_scenario reports an unreadable path as an io error") {
    try {
        load_scenario("/nonexistent/path/to/scenario.json");
        FAIL("expected an io error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Io);
    }
}

TEST_CASE("canonical dump is a fixed point and hashes are reproducible") {
    const Scenario sc = parse_scenario(mini_json());
    const std::string dump = canonical_dump(sc);

    // The dump must itself be a loadable scenario that hashes identically.
    const Scenario round = parse_scenario(dump);
    CHECK(canonical_dump(round) == dump);
    CHECK(scenario_hash(round) == scenario_hash(sc));

    // Parsing the same text twice gives the same hash; changing the seed
    // changes it.
    CHECK(scenario_hash(parse_scenario(mini_json())) == scenario_hash(sc));
    const Scenario other = parse_scenario(mini_json(R"("seed": 42)"));
    CHECK(scenario_hash(other) != scenario_hash(sc));
}

TEST_CASE("build_region constructs the schema region kinds with boundaries") {
    const SplittingChart chart = catalog("minkowski");
    Scenario sc = parse_scenario(mini_json(
        R"("region": {"kind": "annulus", "center": [0.0, 0.0], "inner": 0.4, "outer": 1.5})"));
    const RegionSpec annulus = build_region(sc, chart);
    CHECK(annulus.description == "annulus");
    CHECK(annulus.boundary_samples.size() == 256u); // 128 per rim
    Vec in_pt(2), out_pt(2);
    in_pt << 1.0, 0.0;
    out_pt << 0.1, 0.0;
    CHECK(annulus.inside(Event(in_pt, 0.0)));
    CHECK_FALSE(annulus.inside(Event(out_pt, 0.0)));

    Scenario ball = parse_scenario(mini_json(
        R"("region": {"kind": "ball", "center": [0.0, 0.0], "radius": 2.0})"));
    const RegionSpec b = build_region(ball, chart);
    CHECK(b.boundary_samples.size() == 128u);
    CHECK(b.inside(Event(in_pt, 0.0)));

    Scenario box = parse_scenario(mini_json(
        R"("region": {"kind": "box", "min": [-1.0, -1.0], "max": [2.0, 1.0]})"));
    const RegionSpec bx = build_region(box, chart);
    CHECK(bx.boundary_samples.size() == 128u);
    CHECK(bx.inside(Event(in_pt, 0.0)));
    Vec far(2);
    far << 3.0, 0.0;
    CHECK_FALSE(bx.inside(Event(far, 0.0)));

    // Dimension mismatch between region and chart is a validation error.
    Scenario bad = parse_scenario(mini_json(
        R"("region": {"kind": "ball", "center": [0.0, 0.0, 0.0], "radius": 1.0})"));
    CHECK_THROWS_AS(build_region(bad, chart), Error);
}

TEST_CASE("run solves the flat unit problem with a single direct ray") {
    const Scenario sc = parse_scenario(mini_json(R"("hessian_modes": 6)"));
    const RunReport report = run(sc);

    REQUIRE(report.rays.size() == 1u);
    const RayResult& ray = report.rays[0];
    CHECK(ray.id == 0);
    CHECK(ray.tau == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(ray.index == 0);
    CHECK(ray.nondegenerate);
    CHECK(ray.conjugate_points.empty());
    CHECK(ray.residual < 1e-6);
    CHECK(ray.endpoint_miss < 1e-6);
    CHECK(ray.hessian_index == 0); // numeric cross-check agrees

    CHECK(report.relations.consistent);
    CHECK_FALSE(report.ledger_violated);
    CHECK(report.parity.consistent);
    CHECK(report.parity.message == "ray count is odd, as expected in a contractible region");
    CHECK(report.series.counts.front() == 1);
}

TEST_CASE("run is byte-deterministic for a fixed scenario") {
    const Scenario sc = parse_scenario(mini_json());
    const RunReport a = run(sc);
    const RunReport b = run(sc);
    CHECK(report_json(a) == report_json(b));
    CHECK(ledger_text(a) == ledger_text(b));
}

TEST_CASE("past search finds the backward ray with a negative arrival") {
    const Scenario sc = parse_scenario(mini_json(R"("past": true)"));
    const RunReport report = run(sc);
    REQUIRE(report.rays.size() == 1u);
    CHECK(report.rays[0].tau == doctest::Approx(-1.0).epsilon(1e-6));
    CHECK(report.rays[0].index == 0);
}

TEST_CASE("a Betti override replaces the contractible profile in the audit") {
    const Scenario sc = parse_scenario(mini_json(
        R"("topology": {"contractible": false, "betti": [1, 1]})"));
    const RunReport report = run(sc);
    REQUIRE(report.series.betti.size() >= 2u);
    CHECK(report.series.betti[0] == 1);
    CHECK(report.series.betti[1] == 1);
    // One ray cannot meet the floor of two for a noncontractible region.
    CHECK_FALSE(report.parity.consistent);
}

TEST_CASE("emit_outputs writes the deterministic report bundle") {
    namespace fs = std::filesystem;
    const Scenario sc = parse_scenario(mini_json());
    const RunReport report = run(sc);

    const fs::path dir =
        fs::temp_directory_path() / ("fermat-test-out-" + std::to_string(::getpid()));
    fs::remove_all(dir);
    emit_outputs(report, dir.string());

    for (const char* name : {"report.json", "rays.csv", "ray_0.csv", "ledger.txt", "timings.json"})
        CHECK(fs::exists(dir / name));

    const std::string csv = slurp(dir / "rays.csv");
    CHECK(csv.rfind("id,tau,index,nondegenerate,residual,endpoint_miss,conjugate_count,start\n", 0) == 0);

    const std::string ray_csv = slurp(dir / "ray_0.csv");
    CHECK(ray_csv.rfind("s,x0,x1,t,v0,v1,vt\n", 0) == 0);

    const std::string ledger = slurp(dir / "ledger.txt");
    CHECK(ledger.find("index audit") != std::string::npos);
    CHECK(ledger.find("count relations: consistent") != std::string::npos);

    CHECK(slurp(dir / "report.json") == report_json(report));
    fs::remove_all(dir);
}
