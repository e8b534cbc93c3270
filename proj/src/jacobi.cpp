#include "fermat/jacobi.hpp"

#include <algorithm>
#include <cmath>

namespace fermat {

namespace {

Vec pack(const Event& z) { return z.coords(); }

// Geodesic right-hand side: z' = v, v' = -Gamma[v, v].
struct GeodesicRhs {
    const SplittingChart& chart;
    Vec acc(const Vec& zc, const Vec& v) const {
        const std::vector<Mat> gamma = christoffel(chart, Event::from_coords(zc));
        return -christoffel_apply(gamma, v, v);
    }
};

// One RK4 step of the joint system (z, v, A, B) where the linear blocks obey
//   A' = B - Gamma[v, A] (columnwise),  B' = -Gamma[v, B] - R(A, v) v
// when `jacobi` is true, or the pure transport rule A' = -Gamma[v, A] with B
// unused when false.  Columns of A are Jacobi fields resp. transported frames.
struct JointState {
    Vec z, v;
    Mat a, b;
};

JointState joint_derivative(const SplittingChart& chart, const JointState& s, bool jacobi) {
    const Event z = Event::from_coords(s.z);
    const std::vector<Mat> gamma = christoffel(chart, z);
    JointState d;
    d.z = s.v;
    d.v = -christoffel_apply(gamma, s.v, s.v);
    const int cols = static_cast<int>(s.a.cols());
    d.a.resize(s.a.rows(), cols);
    d.b.resize(s.b.rows(), s.b.cols());
    if (jacobi) {
        const Mat r_op = curvature_operator(chart, z, s.v);
        for (int c = 0; c < cols; ++c) {
            d.a.col(c) = s.b.col(c) - christoffel_apply(gamma, s.v, s.a.col(c));
            d.b.col(c) = -christoffel_apply(gamma, s.v, s.b.col(c)) - r_op * s.a.col(c);
        }
    } else {
        for (int c = 0; c < cols; ++c)
            d.a.col(c) = -christoffel_apply(gamma, s.v, s.a.col(c));
    }
    return d;
}

JointState joint_axpy(const JointState& s, double h, const JointState& d) {
    JointState out;
    out.z = s.z + h * d.z;
    out.v = s.v + h * d.v;
    out.a = s.a + h * d.a;
    out.b = s.b + h * d.b;
    return out;
}

JointState joint_rk4(const SplittingChart& chart, const JointState& s, double h, bool jacobi) {
    const JointState k1 = joint_derivative(chart, s, jacobi);
    const JointState k2 = joint_derivative(chart, joint_axpy(s, 0.5 * h, k1), jacobi);
    const JointState k3 = joint_derivative(chart, joint_axpy(s, 0.5 * h, k2), jacobi);
    const JointState k4 = joint_derivative(chart, joint_axpy(s, h, k3), jacobi);
    JointState out;
    out.z = s.z + (h / 6.0) * (k1.z + 2.0 * k2.z + 2.0 * k3.z + k4.z);
    out.v = s.v + (h / 6.0) * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v);
    out.a = s.a + (h / 6.0) * (k1.a + 2.0 * k2.a + 2.0 * k3.a + k4.a);
    out.b = s.b + (h / 6.0) * (k1.b + 2.0 * k2.b + 2.0 * k3.b + k4.b);
    return out;
}

bool state_in_domain(const SplittingChart& chart, const Vec& zc) {
    if (!zc.allFinite())
        return false;
    const Event z = Event::from_coords(zc);
    return chart.in_domain(z.x, z.t);
}

} // namespace

Event GeodesicRecord::position_at(double sp) const {
    const double sc = std::clamp(sp, s.front(), s.back());
    auto it = std::upper_bound(s.begin(), s.end(), sc);
    int hi = std::clamp<int>(static_cast<int>(it - s.begin()), 1, samples() - 1);
    const int lo = hi - 1;
    const double h = s[hi] - s[lo];
    const double th = h > 0.0 ? (sc - s[lo]) / h : 0.0;
    const double h00 = (2 * th - 3) * th * th + 1;
    const double h10 = ((th - 2) * th + 1) * th;
    const double h01 = (3 - 2 * th) * th * th;
    const double h11 = (th - 1) * th * th;
    const Vec zc = h00 * pack(z[lo]) + h * h10 * v[lo] + h01 * pack(z[hi]) + h * h11 * v[hi];
    return Event::from_coords(zc);
}

Vec GeodesicRecord::velocity_at(double sp) const {
    const double sc = std::clamp(sp, s.front(), s.back());
    auto it = std::upper_bound(s.begin(), s.end(), sc);
    int hi = std::clamp<int>(static_cast<int>(it - s.begin()), 1, samples() - 1);
    const int lo = hi - 1;
    const double h = s[hi] - s[lo];
    const double th = h > 0.0 ? (sc - s[lo]) / h : 0.0;
    const double d00 = 6 * th * (th - 1);
    const double d10 = (3 * th - 4) * th + 1;
    const double d01 = 6 * th * (1 - th);
    const double d11 = (3 * th - 2) * th;
    return (d00 * pack(z[lo]) + d01 * pack(z[hi])) / h + d10 * v[lo] + d11 * v[hi];
}

GeodesicRecord integrate_null_geodesic(const SplittingChart& chart,
                                       const Event& z0, const Vec& v0,
                                       double length, double rk_step) {
    if (length <= 0.0 || rk_step <= 0.0)
        throw Error(ErrorCode::Validation, "geodesic integration needs positive length and step");
    const int n_steps = std::max(1, static_cast<int>(std::ceil(length / rk_step)));
    const double h = length / n_steps;
    const GeodesicRhs rhs{chart};

    GeodesicRecord rec;
    rec.s.reserve(n_steps + 1);
    rec.z.reserve(n_steps + 1);
    rec.v.reserve(n_steps + 1);

    Vec zc = pack(z0);
    Vec v = v0;
    if (!state_in_domain(chart, zc))
        throw Error(ErrorCode::OutOfDomain, "geodesic start lies outside the chart domain", 0.0);
    rec.s.push_back(0.0);
    rec.z.push_back(z0);
    rec.v.push_back(v);

    for (int i = 0; i < n_steps; ++i) {
        const Vec k1z = v, k1v = rhs.acc(zc, v);
        const Vec z2 = zc + 0.5 * h * k1z, v2 = v + 0.5 * h * k1v;
        const Vec k2z = v2, k2v = rhs.acc(z2, v2);
        const Vec z3 = zc + 0.5 * h * k2z, v3 = v + 0.5 * h * k2v;
        const Vec k3z = v3, k3v = rhs.acc(z3, v3);
        const Vec z4 = zc + h * k3z, v4 = v + h * k3v;
        const Vec k4z = v4, k4v = rhs.acc(z4, v4);
        const Vec zn = zc + (h / 6.0) * (k1z + 2.0 * k2z + 2.0 * k3z + k4z);
        const Vec vn = v + (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        if (!state_in_domain(chart, zn)) {
            rec.left_domain = true;
            rec.exit_s = (i + 1) * h;
            return rec;
        }
        zc = zn;
        v = vn;
        rec.s.push_back((i + 1) * h);
        rec.z.push_back(Event::from_coords(zc));
        rec.v.push_back(v);
    }
    return rec;
}

double geodesic_residual(const SplittingChart& chart, const GeodesicRecord& rec) {
    const int n = rec.samples();
    if (n < 5)
        throw Error(ErrorCode::Validation, "residual check needs at least five samples");
    const double h = rec.s[1] - rec.s[0];
    double worst = 0.0;
    for (int i = 2; i < n - 2; ++i) {
        // Fifth-order-accurate first derivative of the stored velocity, so the
        // check measures the integrator rather than the stencil.
        const Vec vdot = (-rec.v[i + 2] + 8.0 * rec.v[i + 1] - 8.0 * rec.v[i - 1] + rec.v[i - 2]) / (12.0 * h);
        const std::vector<Mat> gamma = christoffel(chart, rec.z[i]);
        const Vec accel = christoffel_apply(gamma, rec.v[i], rec.v[i]);
        const Vec res = vdot + accel;
        // Normalized by the local acceleration scale so the defect is
        // comparable across affine reparameterizations of the same ray.
        const double scale = std::max(1.0, accel.cwiseAbs().maxCoeff());
        worst = std::max(worst, res.cwiseAbs().maxCoeff() / scale);
    }
    return worst;
}

Vec null_velocity(const SplittingChart& chart, const Event& z, const Vec& u) {
    const Vec d = chart.delta(z.x, z.t);
    const Mat a = chart.alpha(z.x, z.t);
    const double dd = d.dot(u);
    Vec v(z.x.size() + 1);
    v.head(z.x.size()) = u;
    v(z.x.size()) = dd + std::sqrt(std::max(0.0, dd * dd + u.dot(a * u)));
    return v;
}

RefineResult refine_geodesic(const SplittingChart& chart,
                             const LiftedPolyline& polyline,
                             const ObserverCurve& obs,
                             double rk_step, double tol, int max_iters) {
    const Event p(polyline.path.knots.front(), polyline.knot_times.front());
    const int n = chart.sdim();
    const double scale = 1.0 + obs.x_obs.norm();

    auto shoot = [&](const Vec& u, GeodesicRecord* out) -> Vec {
        const GeodesicRecord rec = integrate_null_geodesic(chart, p, null_velocity(chart, p, u), 1.0, rk_step);
        if (rec.left_domain) {
            if (out) *out = rec;
            return Vec::Constant(n, std::numeric_limits<double>::quiet_NaN());
        }
        if (out) *out = rec;
        return Vec(rec.end().x - obs.x_obs);
    };

    RefineResult result;
    Vec u = polyline.path.tangent(0);
    if (u.norm() == 0.0)
        u = obs.x_obs - p.x; // degenerate first chord: aim at the observer
    GeodesicRecord rec;
    Vec miss = shoot(u, &rec);
    double best = miss.allFinite() ? miss.norm() : std::numeric_limits<double>::infinity();

    for (int iter = 0; iter < max_iters; ++iter) {
        result.iterations = iter;
        if (best < tol * scale)
            break;
        if (!miss.allFinite())
            break;
        // Forward-difference Jacobian of the endpoint miss in the launch
        // direction; central differences double the cost for no benefit at
        // the accuracy the line search needs.
        const double fd = 1e-6 * (1.0 + u.norm());
        Mat jac(n, n);
        bool jac_ok = true;
        for (int c = 0; c < n; ++c) {
            Vec up = u;
            up(c) += fd;
            const Vec mp = shoot(up, nullptr);
            if (!mp.allFinite()) {
                jac_ok = false;
                break;
            }
            jac.col(c) = (mp - miss) / fd;
        }
        if (!jac_ok)
            break;
        const Vec step = jac.fullPivLu().solve(-miss);
        if (!step.allFinite())
            break;
        double lambda = 1.0;
        bool improved = false;
        for (int back = 0; back < 8; ++back) {
            GeodesicRecord trial_rec;
            const Vec trial_miss = shoot(u + lambda * step, &trial_rec);
            if (trial_miss.allFinite() && trial_miss.norm() < best) {
                u += lambda * step;
                miss = trial_miss;
                rec = trial_rec;
                best = miss.norm();
                improved = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!improved)
            break;
    }

    result.geodesic = rec;
    result.endpoint_miss = best;
    result.converged = std::isfinite(best) && best < tol * scale;
    result.arrival_time = rec.left_domain ? std::numeric_limits<double>::quiet_NaN()
                                          : rec.end().t;
    return result;
}

JacobiSolution solve_jacobi(const SplittingChart& chart,
                            const GeodesicRecord& geodesic,
                            const Vec& zeta0, const Vec& dzeta0) {
    const int n = geodesic.samples();
    if (n < 2)
        throw Error(ErrorCode::Validation, "Jacobi integration needs a recorded geodesic");
    const double h = geodesic.s[1] - geodesic.s[0];

    JointState st;
    st.z = pack(geodesic.start());
    st.v = geodesic.v.front();
    st.a = zeta0;
    st.b = dzeta0;

    JacobiSolution sol;
    sol.s = geodesic.s;
    sol.zeta.reserve(n);
    sol.dzeta.reserve(n);
    sol.zeta.push_back(st.a.col(0));
    sol.dzeta.push_back(st.b.col(0));
    for (int i = 1; i < n; ++i) {
        st = joint_rk4(chart, st, h, /*jacobi=*/true);
        sol.zeta.push_back(st.a.col(0));
        sol.dzeta.push_back(st.b.col(0));
    }
    return sol;
}

namespace {

// Scaled smallest singular value sigma_min(J) / (s * sigma_max(J)): the
// dimensionless rank-deficiency measure the conjugate-point scan minimizes.
double rank_gap(const Mat& j, double s) {
    Eigen::JacobiSVD<Mat> svd(j);
    const double top = svd.singularValues()(0);
    if (top <= 0.0 || s <= 0.0)
        return 1.0;
    return svd.singularValues()(svd.singularValues().size() - 1) / (s * top);
}

struct JacobiGrid {
    std::vector<JointState> states; // cached joint states at the record grid
    std::vector<double> s;
};

JointState advance_to(const SplittingChart& chart, JointState st, double from, double to) {
    const double span = to - from;
    if (span <= 0.0)
        return st;
    const int sub = 4;
    const double h = span / sub;
    for (int i = 0; i < sub; ++i)
        st = joint_rk4(chart, st, h, /*jacobi=*/true);
    return st;
}

} // namespace

ConjugateScan conjugate_points(const SplittingChart& chart,
                               const GeodesicRecord& geodesic,
                               double svd_tol, double dedup_radius) {
    const int n = geodesic.samples();
    const int dim = chart.dim;
    if (n < 3)
        throw Error(ErrorCode::Validation, "conjugate-point scan needs a recorded geodesic");
    const double h = geodesic.s[1] - geodesic.s[0];

    // Propagate the matrix Jacobi problem J(0) = 0, D_s J(0) = I along the
    // ray, caching the full joint state at every grid point so candidate
    // minima can be refined from the nearest cache entry.
    JacobiGrid grid;
    grid.states.reserve(n);
    grid.s = geodesic.s;
    JointState st;
    st.z = pack(geodesic.start());
    st.v = geodesic.v.front();
    st.a = Mat::Zero(dim, dim);
    st.b = Mat::Identity(dim, dim);
    grid.states.push_back(st);
    for (int i = 1; i < n; ++i) {
        st = joint_rk4(chart, st, h, /*jacobi=*/true);
        grid.states.push_back(st);
    }

    std::vector<double> gap(n, 1.0);
    for (int i = 1; i < n; ++i)
        gap[i] = rank_gap(grid.states[i].a, grid.s[i]);

    // Candidate brackets: interior local minima of the rank gap below a loose
    // trigger; the strict decision happens after ternary refinement.
    const double trigger = 0.05;
    ConjugateScan scan;
    std::vector<ConjugatePoint> found;
    for (int i = 1; i < n; ++i) {
        const bool left_ok = gap[i] <= gap[i - 1];
        const bool right_ok = (i + 1 >= n) || gap[i] <= gap[i + 1];
        if (!(left_ok && right_ok && gap[i] < trigger))
            continue;
        const int lo = std::max(0, i - 1);
        const int hi = std::min(n - 1, i + 1);
        double a = grid.s[lo], b = grid.s[hi];
        auto eval = [&](double sp) {
            const JointState probe = advance_to(chart, grid.states[lo], grid.s[lo], sp);
            return rank_gap(probe.a, sp);
        };
        for (int it = 0; it < 60 && (b - a) > 1e-12; ++it) {
            const double m1 = a + (b - a) / 3.0;
            const double m2 = b - (b - a) / 3.0;
            if (eval(m1) < eval(m2))
                b = m2;
            else
                a = m1;
        }
        const double s_star = 0.5 * (a + b);
        const JointState at = advance_to(chart, grid.states[lo], grid.s[lo], s_star);
        Eigen::JacobiSVD<Mat> svd(at.a);
        const double top = svd.singularValues()(0);
        const double thresh = svd_tol * s_star * top;
        int mult = 0;
        for (int k = 0; k < svd.singularValues().size(); ++k)
            if (svd.singularValues()(k) < thresh)
                ++mult;
        if (mult == 0)
            continue;
        if (mult > dim - 1) {
            mult = dim - 1;
            scan.multiplicity_clamped = true;
        }
        found.push_back({s_star, mult});
    }

    // Merge refinements of the same crossing and split off an endpoint hit.
    std::sort(found.begin(), found.end(),
              [](const ConjugatePoint& x, const ConjugatePoint& y) { return x.s < y.s; });
    const double s_end = geodesic.s.back();
    for (const ConjugatePoint& c : found) {
        if (!scan.points.empty() && c.s - scan.points.back().s < dedup_radius) {
            scan.points.back().multiplicity = std::max(scan.points.back().multiplicity, c.multiplicity);
            continue;
        }
        scan.points.push_back(c);
    }
    std::vector<ConjugatePoint> interior;
    for (const ConjugatePoint& c : scan.points) {
        if (std::abs(c.s - s_end) < 1e-4) {
            scan.endpoint_conjugate = true;
            continue;
        }
        interior.push_back(c);
    }
    scan.points = std::move(interior);
    scan.geometric_index = 0;
    for (const ConjugatePoint& c : scan.points)
        scan.geometric_index += c.multiplicity;
    return scan;
}

int geometric_index(const SplittingChart& chart, const GeodesicRecord& geodesic,
                    double svd_tol, double dedup_radius) {
    return conjugate_points(chart, geodesic, svd_tol, dedup_radius).geometric_index;
}

std::vector<Vec> transport_observer_field(const SplittingChart& chart,
                                          const GeodesicRecord& geodesic) {
    const int n = geodesic.samples();
    const int dim = chart.dim;
    if (n < 2)
        throw Error(ErrorCode::Validation, "transport needs a recorded geodesic");
    const double h = geodesic.s[1] - geodesic.s[0];

    // Forward parallel-transport propagator P(s), then solve P(1) y0 = W so
    // that Y(s) = P(s) y0 is the parallel field matching W at arrival.
    std::vector<Mat> prop;
    prop.reserve(n);
    JointState st;
    st.z = pack(geodesic.start());
    st.v = geodesic.v.front();
    st.a = Mat::Identity(dim, dim);
    st.b = Mat::Zero(dim, dim);
    prop.push_back(st.a);
    for (int i = 1; i < n; ++i) {
        st = joint_rk4(chart, st, h, /*jacobi=*/false);
        prop.push_back(st.a);
    }
    const Vec y0 = prop.back().fullPivLu().solve(w_field(dim));
    std::vector<Vec> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i)
        out.push_back(prop[i] * y0);
    return out;
}

HessianResult hessian_matrix(const SplittingChart& chart,
                             const GeodesicRecord& geodesic,
                             int n_modes) {
    const int n = geodesic.samples();
    const int dim = chart.dim;
    const int screen = dim - 2;
    if (n_modes < 1)
        throw Error(ErrorCode::Validation, "Hessian assembly needs at least one mode");
    if (screen < 1)
        throw Error(ErrorCode::Validation, "Hessian assembly needs dimension at least three");
    if (n < 3)
        throw Error(ErrorCode::Validation, "Hessian assembly needs a recorded geodesic");
    const double h = geodesic.s[1] - geodesic.s[0];
    const double s_span = geodesic.s.back();
    if (s_span <= 0.0)
        throw Error(ErrorCode::Validation, "Hessian assembly needs a nontrivial parameter span");

    // Parallel transport propagator along the ray, the arrival-matched
    // observer field Y, and a parallel screen frame: vectors orthogonal (in
    // g) to both the ray tangent and Y, on which the second variation of the
    // arrival time is positive definite in flat space.
    std::vector<Mat> prop;
    prop.reserve(n);
    {
        JointState st;
        st.z = pack(geodesic.start());
        st.v = geodesic.v.front();
        st.a = Mat::Identity(dim, dim);
        st.b = Mat::Zero(dim, dim);
        prop.push_back(st.a);
        for (int i = 1; i < n; ++i) {
            st = joint_rk4(chart, st, h, /*jacobi=*/false);
            prop.push_back(st.a);
        }
    }
    const Vec y0 = prop.back().fullPivLu().solve(w_field(dim));

    const Event z0 = geodesic.start();
    const Vec v0 = geodesic.v.front();
    const Mat g0 = metric_matrix(chart, z0);
    const double gyy = y0.dot(g0 * y0);
    const double gyv = y0.dot(g0 * v0);
    const double gvv = v0.dot(g0 * v0);
    // The pair (Y, tangent) spans a 2-plane on which g is nondegenerate as
    // long as the ray is genuinely lightlike and Y timelike.
    const double det2 = gyy * gvv - gyv * gyv;
    if (std::abs(det2) < 1e-14)
        throw Error(ErrorCode::BasisDegenerate, "observer field and ray tangent do not span a timelike plane");

    std::vector<Vec> frame0;
    for (int c = 0; c < dim && static_cast<int>(frame0.size()) < screen; ++c) {
        Vec cand = Vec::Unit(dim, c);
        // Project out the span of (Y, tangent) with the 2x2 Gram inverse.
        const double by = cand.dot(g0 * y0);
        const double bv = cand.dot(g0 * v0);
        const double cy = (gvv * by - gyv * bv) / det2;
        const double cv = (gyy * bv - gyv * by) / det2;
        cand -= cy * y0 + cv * v0;
        // Orthonormalize against the accepted frame vectors in g.
        for (const Vec& e : frame0)
            cand -= (cand.dot(g0 * e)) * e;
        const double norm2 = cand.dot(g0 * cand);
        if (norm2 < 1e-10)
            continue; // candidate fell into the excluded plane; try the next axis
        frame0.push_back(cand / std::sqrt(norm2));
    }
    if (static_cast<int>(frame0.size()) != screen)
        throw Error(ErrorCode::BasisDegenerate, "could not build a screen frame for the Hessian basis");

    // Per-grid data: transported Y, frame, curvature operator, metric.
    std::vector<Vec> y_field(n);
    std::vector<std::vector<Vec>> frame(n, std::vector<Vec>(screen));
    std::vector<Mat> g_at(n), r_at(n);
    for (int i = 0; i < n; ++i) {
        y_field[i] = prop[i] * y0;
        for (int a = 0; a < screen; ++a)
            frame[i][a] = prop[i] * frame0[a];
        g_at[i] = metric_matrix(chart, geodesic.z[i]);
        r_at[i] = curvature_operator(chart, geodesic.z[i], geodesic.v[i]);
    }

    // Basis fields zeta_(k,a)(s) = sin(k pi s / span) frame_a(s), with the
    // covariant derivative in closed form because the frame is parallel.
    // A residual component along Y (numerical transport drift) is projected
    // off against the ray tangent before the quadratic form is assembled.
    const int k_total = n_modes * screen;
    std::vector<std::vector<Vec>> fields(k_total, std::vector<Vec>(n));
    std::vector<std::vector<Vec>> dfields(k_total, std::vector<Vec>(n));
    for (int k = 1; k <= n_modes; ++k) {
        for (int a = 0; a < screen; ++a) {
            const int idx = (k - 1) * screen + a;
            std::vector<double> mu(n);
            for (int i = 0; i < n; ++i) {
                const double phase = k * M_PI * geodesic.s[i] / s_span;
                const Vec raw = std::sin(phase) * frame[i][a];
                const double gyz = y_field[i].dot(g_at[i] * geodesic.v[i]);
                mu[i] = raw.dot(g_at[i] * geodesic.v[i]) / gyz;
                fields[idx][i] = raw - mu[i] * y_field[i];
            }
            for (int i = 0; i < n; ++i) {
                const double phase = k * M_PI * geodesic.s[i] / s_span;
                const Vec draw = (k * M_PI / s_span) * std::cos(phase) * frame[i][a];
                double dmu;
                if (i == 0)
                    dmu = (mu[1] - mu[0]) / h;
                else if (i == n - 1)
                    dmu = (mu[n - 1] - mu[n - 2]) / h;
                else
                    dmu = (mu[i + 1] - mu[i - 1]) / (2.0 * h);
                dfields[idx][i] = draw - dmu * y_field[i];
            }
        }
    }

    // Prefactor mapping the index form to the second derivative of arrival
    // time: -1 / g(W, tangent) at the arrival end, which is positive for a
    // future-pointing ray.
    const Mat g_end = g_at[n - 1];
    const double gw_end = w_field(dim).dot(g_end * geodesic.v.back());
    if (gw_end >= 0.0)
        throw Error(ErrorCode::Validation, "ray tangent is not future-pointing at arrival");
    const double pref = -1.0 / gw_end;

    HessianResult result;
    result.n_modes = n_modes;
    Mat raw_h = Mat::Zero(k_total, k_total);
    Mat gram = Mat::Zero(k_total, k_total);
    for (int i = 0; i < n; ++i) {
        const double w = (i == 0 || i == n - 1) ? 0.5 * h : h;
        for (int p = 0; p < k_total; ++p) {
            const Vec rz = r_at[i] * fields[p][i];
            for (int q = 0; q < k_total; ++q) {
                raw_h(p, q) += w * (dfields[p][i].dot(g_at[i] * dfields[q][i]) -
                                    rz.dot(g_at[i] * fields[q][i]));
                const double gwp = g_at[i].row(dim - 1).dot(fields[p][i]);
                const double gwq = g_at[i].row(dim - 1).dot(fields[q][i]);
                gram(p, q) += w * (fields[p][i].dot(g_at[i] * fields[q][i]) + 2.0 * gwp * gwq);
            }
        }
    }
    raw_h *= pref;

    const double scale = std::max(1e-300, raw_h.cwiseAbs().maxCoeff());
    result.asymmetry = (raw_h - raw_h.transpose()).cwiseAbs().maxCoeff() / scale;
    result.h = 0.5 * (raw_h + raw_h.transpose());
    result.gram = 0.5 * (gram + gram.transpose());

    Eigen::SelfAdjointEigenSolver<Mat> ges(result.gram);
    const double gmin = ges.eigenvalues().minCoeff();
    const double gmax = ges.eigenvalues().maxCoeff();
    if (gmin <= 0.0 || gmax / gmin > 1e12)
        throw Error(ErrorCode::BasisDegenerate, "Hessian basis Gram matrix is ill conditioned");
    return result;
}

InertiaResult morse_index_numeric(const HessianResult& hess, double inertia_tol) {
    Eigen::GeneralizedSelfAdjointEigenSolver<Mat> solver(hess.h, hess.gram);
    if (solver.info() != Eigen::Success)
        throw Error(ErrorCode::BasisDegenerate, "generalized eigenvalue solve failed");
    InertiaResult result;
    const Vec ev = solver.eigenvalues();
    const double scale = ev.cwiseAbs().maxCoeff();
    const double thresh = inertia_tol * std::max(scale, 1e-300);
    for (int i = 0; i < ev.size(); ++i) {
        result.eigenvalues.push_back(ev(i));
        if (ev(i) < -thresh)
            ++result.negative;
        else if (ev(i) <= thresh)
            ++result.near_zero;
    }
    return result;
}

} // namespace fermat
