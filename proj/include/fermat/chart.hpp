#pragma once

#include "fermat/types.hpp"

#include <functional>
#include <map>
#include <vector>

namespace fermat {

// A Lorentzian metric in product coordinates (x, t) adapted to a unit timelike
// reference field W = d/dt:
//
//   g[(xi,th),(xi,th)] = <alpha(x,t) xi, xi> + 2 <delta(x,t), xi> th - th^2
//
// alpha is symmetric positive definite, delta is a spatial covector field, and
// the tt-coefficient is identically -1 (the chart is normalized so W has unit
// length and its integral curves are the vertical lines x = const, with t the
// proper time along them).  Every operation in the library evaluates against
// this representation; tangent vectors are packed as (x_1..x_{N-1}, t).
struct SplittingChart {
    int dim = 3; // spacetime dimension N >= 3
    std::function<Mat(const Vec& x, double t)> alpha;
    std::function<Vec(const Vec& x, double t)> delta;
    std::function<bool(const Vec& x, double t)> in_domain;
    double fd_step = 1e-4; // central-difference step for metric derivatives
    std::string name = "custom";

    int sdim() const { return dim - 1; }
    bool contains(const Event& z) const { return in_domain(z.x, z.t); }
};

// Region of interest Lambda inside the chart domain.  The solver relies on the
// region being light-convex (no null geodesic with endpoints inside leaves it);
// check_light_convexity probes that assumption, run_shortening only guards
// node membership.
struct RegionSpec {
    std::function<bool(const Event&)> inside = [](const Event&) { return true; };
    std::vector<Event> boundary_samples; // optional, for convexity probing
    std::string description = "all";
};

// --- metric evaluation ----------------------------------------------------

// Full N x N covariant metric matrix at z: [alpha, delta; delta^T, -1].
Mat metric_matrix(const SplittingChart& chart, const Event& z);

// g(z)[zeta, eta]; tangents packed (spatial..., time).
double eval_metric(const SplittingChart& chart, const Event& z,
                   const Vec& zeta, const Vec& eta);

// Auxiliary Riemannian inner product obtained by flipping the sign of the
// W-component: <zeta,eta>_R = g[zeta,eta] - 2 g[W,zeta] g[W,eta] / g[W,W].
double riemann_inner(const SplittingChart& chart, const Event& z,
                     const Vec& zeta, const Vec& eta);

double riemann_norm(const SplittingChart& chart, const Event& z, const Vec& zeta);

// The reference field W = (0,...,0,1) as a packed tangent vector.
Vec w_field(int dim);

// Partial derivatives d_k g_{ij} for k = 0..N-1 (spatial first, then t),
// by central finite differences with the chart's fd_step.
std::vector<Mat> metric_derivatives(const SplittingChart& chart, const Event& z);

// Christoffel symbols of the second kind, G[k](i,j) = Gamma^k_{ij}, from
// central finite differences of the metric.  Exactly symmetric in (i,j).
std::vector<Mat> christoffel(const SplittingChart& chart, const Event& z);

// Gamma contraction: (Gamma[u,v])^k = Gamma^k_{ij} u^i v^j.
Vec christoffel_apply(const std::vector<Mat>& gamma, const Vec& u, const Vec& v);

// Riemann curvature applied twice to v: returns R(zeta, v) v, computed from a
// central-difference derivative of the Christoffel symbols.  Only consumed by
// the Jacobi right-hand side and the arrival-time Hessian.
Vec curvature_apply(const SplittingChart& chart, const Event& z,
                    const Vec& zeta, const Vec& v);

// Full curvature contraction matrix M(z, v) with M * zeta = R(zeta, v) v.
// One evaluation amortizes the Christoffel stencil over all zeta.
Mat curvature_operator(const SplittingChart& chart, const Event& z, const Vec& v);

// --- catalog --------------------------------------------------------------

// Built-in charts:
//   minkowski                  alpha = I, delta = 0
//   static_spherical           alpha = A(r) I with
//                              A(r) = ((1 + M/2r)^3 / (1 - M/2r))^2, delta = 0;
//                              reproduces the classic weak-field light bending
//                              4M/b and has a light ring at r = (2+sqrt(3))M/2
//   conformally_stationary_demo  alpha = I, delta = const (exercises the
//                              cross-term of the arrival-time lift)
//   product_sphere             static product of a round 2-sphere with the
//                              time axis, in colatitude/longitude coordinates
SplittingChart catalog(const std::string& name,
                       const std::map<std::string, double>& params = {});

std::vector<std::string> catalog_names();

// Chart with alpha/delta tabulated on a rectilinear spatial grid and
// multilinearly interpolated (t-independent).  axes[d] lists the grid
// coordinates of spatial axis d; alpha_values/delta_values are indexed
// row-major over the grid nodes.
SplittingChart grid_chart(const std::vector<std::vector<double>>& axes,
                          const std::vector<Mat>& alpha_values,
                          const std::vector<Vec>& delta_values);

// Time reflection t -> -t of a chart (used for past-directed ray searches).
SplittingChart time_reflect(const SplittingChart& chart);

} // namespace fermat
