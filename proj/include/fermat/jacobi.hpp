#pragma once

#include "fermat/causal.hpp"

#include <optional>
#include <vector>

namespace fermat {

// A sampled solution of the geodesic equation z'' + Gamma[z',z'] = 0 on [0,1],
// stored densely so downstream stages (Jacobi fields, Hessian assembly) can
// reuse the states without re-integrating.
struct GeodesicRecord {
    std::vector<double> s;       // sample parameters, s.front()=0
    std::vector<Event> z;        // positions
    std::vector<Vec> v;          // velocities dz/ds (packed tangents)
    bool left_domain = false;
    double exit_s = 1.0;

    int samples() const { return static_cast<int>(s.size()); }
    const Event& start() const { return z.front(); }
    const Event& end() const { return z.back(); }
    // State at arbitrary parameter by cubic Hermite interpolation of (z, v).
    Event position_at(double sp) const;
    Vec velocity_at(double sp) const;
};

// Fixed-step fourth-order Runge-Kutta integration of the geodesic flow from
// (z0, v0) for parameter length `length`.  If the trajectory leaves the chart
// domain the record is truncated and flagged rather than thrown, so callers
// can inspect the partial ray (e.g. plunging trajectories in a black-hole
// exterior chart).
GeodesicRecord integrate_null_geodesic(const SplittingChart& chart,
                                       const Event& z0, const Vec& v0,
                                       double length = 1.0,
                                       double rk_step = 1e-3);

// Future lightlike velocity over a spatial direction u at z: the time rate
// is the positive root of the lightlike condition, as in the time lift.
Vec null_velocity(const SplittingChart& chart, const Event& z, const Vec& u);

// Max |v'' residual|: re-evaluates z'' + Gamma[z',z'] on the stored samples
// with a fifth-order-accurate difference for v', as an integration check.
double geodesic_residual(const SplittingChart& chart, const GeodesicRecord& rec);

// Polish a lifted polyline into a genuine lightlike geodesic from p to the
// observer line by Newton shooting on the initial spatial direction, with the
// time component of the velocity slaved to the lightlike condition.  Returns
// the refined record plus the achieved endpoint miss.
struct RefineResult {
    GeodesicRecord geodesic;
    double arrival_time = 0.0;
    double endpoint_miss = 0.0; // |x(1) - x_obs|
    bool converged = false;
    int iterations = 0;
};

RefineResult refine_geodesic(const SplittingChart& chart,
                             const LiftedPolyline& polyline,
                             const ObserverCurve& obs,
                             double rk_step = 1e-3,
                             double tol = 1e-10,
                             int max_iters = 50);

// Jacobi field J along a recorded geodesic with initial data (zeta0, dzeta0),
// integrated in the covariant first-order form
//     zeta' = u - Gamma[z', zeta],   u' = -Gamma[z', u] - R(zeta, z') z'
// jointly with the stored base states.  Returns samples of (zeta, D_s zeta).
struct JacobiSolution {
    std::vector<double> s;
    std::vector<Vec> zeta;
    std::vector<Vec> dzeta; // covariant derivative D_s zeta
};

JacobiSolution solve_jacobi(const SplittingChart& chart,
                            const GeodesicRecord& geodesic,
                            const Vec& zeta0, const Vec& dzeta0);

// Matrix Jacobi propagation J(s) with J(0)=0, D_s J(0)=I, plus the conjugate
// point scan: parameters where J(s) loses rank, with multiplicities.
struct ConjugatePoint {
    double s = 0.0;
    int multiplicity = 1;
};

struct ConjugateScan {
    std::vector<ConjugatePoint> points;      // interior points, ascending s
    bool endpoint_conjugate = false;         // rank loss within 1e-4 of s=1
    bool multiplicity_clamped = false;       // a detection exceeded N-2
    int geometric_index = 0;                 // sum of interior multiplicities
};

ConjugateScan conjugate_points(const SplittingChart& chart,
                               const GeodesicRecord& geodesic,
                               double svd_tol = 1e-7,
                               double dedup_radius = 1e-4);

// Sum of interior conjugate-point multiplicities of a recorded ray.
int geometric_index(const SplittingChart& chart, const GeodesicRecord& geodesic,
                    double svd_tol = 1e-7, double dedup_radius = 1e-4);

// Parallel transport of the vertical reference field W backward from the
// arrival endpoint along the geodesic: D_s Y = 0 with Y(1) = W.  Used to
// build the screen basis for the Hessian and to normalize index bookkeeping.
std::vector<Vec> transport_observer_field(const SplittingChart& chart,
                                          const GeodesicRecord& geodesic);

// Second variation of the arrival time at a stationary ray, restricted to a
// K-block Fourier basis of screen vector fields (parallel frames orthogonal
// to both the ray tangent and the transported observer field, modulated by
// sin(k pi s)).  Returns the symmetrized matrix, the Gram matrix of the basis
// in the auxiliary inner product, and the measured asymmetry before
// symmetrization.
struct HessianResult {
    Mat h;            // K(N-2) x K(N-2)
    Mat gram;         // same size, positive definite
    double asymmetry = 0.0;
    int n_modes = 0;  // K
};

HessianResult hessian_matrix(const SplittingChart& chart,
                             const GeodesicRecord& geodesic,
                             int n_modes);

// Inertia of the Hessian pencil (H, Gram): number of negative eigenvalues,
// with a relative threshold separating negative from numerically-zero.
struct InertiaResult {
    int negative = 0;
    int near_zero = 0;
    std::vector<double> eigenvalues;
};

InertiaResult morse_index_numeric(const HessianResult& hess,
                                  double inertia_tol = 1e-8);

} // namespace fermat
