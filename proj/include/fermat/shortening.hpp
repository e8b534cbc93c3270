#pragma once

#include "fermat/jacobi.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fermat {

// Tuning knobs for the arrival-time shortening flow.  Defaults follow the
// scenario schema; scenario files can override any field.
struct ShorteningConfig {
    int n_segments = 16;           // polyline resolution during the flow
    double tau_tol = 1e-8;         // stop: arrival-time decrease per round
    double junction_tol = 5e-3;    // stop: max angle between segment tangents
    double rho_star = -1.0;        // local-minimizer trust radius; <0 = auto
    double d_cap = -1.0;           // cumulative length cap; <0 = auto
    int max_rounds = 2000;         // hard iteration cap
    int local_min_grid = 8;        // interior nodes in the local minimizer
    int local_newton_iters = 30;   // shooting iteration cap per local piece
    int flow_steps_per_segment = 48; // lift resolution during the flow
    double rk_step = 1e-3;         // integration step for refinement/records
    double snap_tol = 1e-9;        // endpoint snap tolerance
};

enum class StopReason {
    Converged,        // tau decrease and junction angles below tolerance
    MaxRounds,        // iteration cap hit before the stopping rule
    LengthCapExceeded,// pseudo-coercivity abort: cumulative length > d_cap
    LeftRegion,       // a node or refined sample escaped the region
};

// One local Fermat problem: minimize the arrival time at target_x over curves
// from q staying within a ball of the trust radius.  Stage one is a damped
// gradient descent over interior nodes of a small polyline; stage two is
// Newton shooting for the connecting lightlike geodesic.  Newton failures are
// reported, not thrown — the flow continues with the descent result.
struct LocalMinResult {
    LiftedPolyline curve;       // from q to (target_x, arrival)
    double arrival = 0.0;
    bool newton_converged = false;
    bool used_fallback = false; // Newton failed; gradient-descent curve kept
};

LocalMinResult local_fermat_minimizer(const SplittingChart& chart,
                                      const Event& q, const Vec& target_x,
                                      const ShorteningConfig& cfg,
                                      double interval_fraction);

// Flow state between rounds: the current lifted polyline and bookkeeping.
struct FlowState {
    LiftedPolyline curve;
    double tau = 0.0;
    int round = 0;
};

// One pass of the first averaging step: replace each sub-arc by the local
// arrival-time minimizer toward the next node (final target: the observer).
// Returns the candidate state; the caller decides acceptance.
FlowState eta1_step(const SplittingChart& chart, const FlowState& state,
                    const ObserverCurve& obs, const ShorteningConfig& cfg);

// Second averaging step on the half-shifted partition (midpoints by arc
// length), which breaks the node locking of step one.
FlowState eta2_step(const SplittingChart& chart, const FlowState& state,
                    const ObserverCurve& obs, const ShorteningConfig& cfg);

struct ShorteningResult {
    StopReason stop = StopReason::Converged;
    LiftedPolyline curve;               // final flow polyline
    std::vector<double> tau_history;    // arrival time after each round
    int rounds = 0;
    double final_junction_angle = 0.0;
    std::optional<RefineResult> refined; // geodesic polish, if it converged
    std::string note;                   // human-readable abort detail
};

ShorteningResult run_shortening(const SplittingChart& chart,
                                const LiftedPolyline& initial,
                                const Event& p, const ObserverCurve& obs,
                                const RegionSpec& region,
                                const ShorteningConfig& cfg);

// Light-convexity probe of a region: near-boundary point pairs are connected
// by the local minimizer and flagged if the connecting curve exits and
// re-enters, and boundary-grazing lightlike geodesics are integrated and
// flagged if they re-enter after leaving.  Returns the number of violations.
struct ConvexityReport {
    int pair_violations = 0;
    int grazing_violations = 0;
    int samples_checked = 0;
    int violations() const { return pair_violations + grazing_violations; }
};

ConvexityReport check_light_convexity(const SplittingChart& chart,
                                      const RegionSpec& region,
                                      int n_samples, double horizon,
                                      std::uint64_t seed = 0);

// Seed polylines for the multi-start search.  Hints:
//   straight            the two-knot chord
//   via                 chord through explicit waypoints
//   side:left/right     chord bowed sideways by an offset
//   winding:n           n extra turns around the domain center (charts with
//                       an angular coordinate)
struct StartHint {
    std::string kind = "straight";
    std::vector<Vec> waypoints;  // for "via"
    double offset = 0.0;         // for "side": signed, left of the chord > 0
    int winding = 0;             // for "winding"
    std::string label = "straight"; // human-readable name used in reports
};

// Spatial seed path for one hint (shared by multi_start and the scenario
// runner, which pairs hints with their outcomes).
SpatialPolyline hint_path(const Event& p, const ObserverCurve& obs,
                          const StartHint& hint);

// Fill the automatic tuning fields (trust radius, length cap) from the
// problem geometry: rho_star = a tenth of twice the spatial chord, d_cap =
// twenty times the lifted straight-chord length.  Used by run_shortening and
// by the canonical scenario echo, so both always agree.
ShorteningConfig resolve_config(const SplittingChart& chart, const Event& p,
                                const ObserverCurve& obs, ShorteningConfig cfg);

std::vector<LiftedPolyline> multi_start(const SplittingChart& chart,
                                        const Event& p, const ObserverCurve& obs,
                                        const std::vector<StartHint>& hints,
                                        const ShorteningConfig& cfg);

} // namespace fermat
