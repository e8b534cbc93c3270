#pragma once

#include "fermat/morse.hpp"
#include "fermat/shortening.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace fermat {

// Declarative problem description, loaded from JSON.  docs/scenario.md is the
// schema reference; unknown keys are rejected so typos fail loudly.
struct Scenario {
    // chart: either a catalog entry or an inline grid chart
    std::string chart_name = "minkowski";
    std::map<std::string, double> chart_params;
    bool chart_is_grid = false;
    std::vector<std::vector<double>> grid_axes;
    std::vector<Mat> grid_alpha;
    std::vector<Vec> grid_delta;

    Event p;                 // source event
    ObserverCurve observer;  // target worldline

    // region: "all" | "ball" | "annulus" | "box" on the spatial slice
    std::string region_kind = "all";
    Vec region_center;
    double region_radius = 0.0;     // ball
    double region_inner = 0.0;      // annulus
    double region_outer = 0.0;      // annulus
    Vec region_min, region_max;     // box

    ShorteningConfig config;
    std::vector<StartHint> starts;

    bool contractible = true;
    bool infinite_betti = false;    // connecting-curve space has unbounded topology
    std::vector<int> betti_override;

    double svd_tol = 1e-7;
    double inertia_tol = 1e-8;
    double dedup_radius = -1.0;     // <0 = auto from problem scale
    std::string parity_policy = "warn"; // "warn" | "fail"

    std::uint64_t seed = 0;
    bool past = false;              // search past-pointing rays instead
    int hessian_modes = 0;          // >0: cross-check index via the Hessian

    bool check_convexity = false;   // probe the region for light convexity
    int convexity_samples = 64;
    double convexity_horizon = -1.0; // geodesic follow length; <0 = auto

    std::string source_path;        // where the scenario was loaded from
};

Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const std::string& json_text);

// Canonical dump used for the content hash: sorted keys, fixed formatting,
// defaults echoed explicitly so semantically equal scenarios hash equal.
std::string canonical_dump(const Scenario& sc);
std::uint64_t scenario_hash(const Scenario& sc);

// Region factory for the schema's region kinds.
RegionSpec build_region(const Scenario& sc, const SplittingChart& chart);
SplittingChart build_chart(const Scenario& sc);

// One connecting ray in the final inventory.
struct RayResult {
    int id = 0;
    double tau = 0.0;                 // observer arrival time
    int index = 0;                    // geometric index (conjugate multiplicities)
    bool nondegenerate = true;        // no endpoint conjugacy
    std::vector<ConjugatePoint> conjugate_points;
    double residual = 0.0;            // geodesic equation residual
    double endpoint_miss = 0.0;
    int hessian_index = -1;           // -1 when the cross-check is off
    GeodesicRecord geodesic;
    std::string start_hint;           // which seed found it
    std::vector<std::string> warnings;
};

struct RunReport {
    Scenario scenario;
    std::vector<RayResult> rays;      // deduplicated, sorted by tau
    IndexSeries series;
    RelationCheck relations;
    ParityResult parity;
    ConvexityReport convexity;        // populated when the probe ran
    bool convexity_probed = false;
    std::vector<std::string> notes;   // run-level warnings and aborts
    std::map<std::string, double> timings_ms; // excluded from report.json
    bool guard_abort = false;         // a start aborted on a guard
    bool ledger_violated = false;
};

RunReport run(const Scenario& sc);

// Write report.json, rays.csv, ray_<id>.csv, ledger.txt and timings.json
// under out_dir.  Everything except timings.json is byte-deterministic for a
// fixed scenario.
void emit_outputs(const RunReport& report, const std::string& out_dir);

std::string report_json(const RunReport& report);
std::string ledger_text(const RunReport& report);

} // namespace fermat
