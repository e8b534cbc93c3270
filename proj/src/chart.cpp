#include "fermat/chart.hpp"

#include <cmath>

namespace fermat {

Mat metric_matrix(const SplittingChart& chart, const Event& z) {
    const int n = chart.sdim();
    const Mat a = chart.alpha(z.x, z.t);
    const Vec d = chart.delta(z.x, z.t);
    if (a.rows() != n || a.cols() != n || d.size() != n)
        throw Error(ErrorCode::Validation, "chart coefficient dimensions do not match the chart dimension");
    Mat g(n + 1, n + 1);
    // Store the spatial block exactly symmetric so that every downstream
    // finite-difference identity that relies on g_ij == g_ji holds bitwise.
    g.topLeftCorner(n, n) = 0.5 * (a + a.transpose());
    g.topRightCorner(n, 1) = d;
    g.bottomLeftCorner(1, n) = d.transpose();
    g(n, n) = -1.0;
    return g;
}

double eval_metric(const SplittingChart& chart, const Event& z,
                   const Vec& zeta, const Vec& eta) {
    if (zeta.size() != chart.dim || eta.size() != chart.dim)
        throw Error(ErrorCode::Validation, "tangent vector size does not match the chart dimension");
    const Mat g = metric_matrix(chart, z);
    return zeta.dot(g * eta);
}

double riemann_inner(const SplittingChart& chart, const Event& z,
                     const Vec& zeta, const Vec& eta) {
    const Mat g = metric_matrix(chart, z);
    const int n = chart.sdim();
    // g[W, v] for the unit vertical field W = d/dt: row n of g applied to v.
    const double gwz = g.row(n).dot(zeta);
    const double gwe = g.row(n).dot(eta);
    // <.,.>_R = g[.,.] - 2 g[W,.] g[W,.] / g[W,W], and g[W,W] = -1.
    return zeta.dot(g * eta) + 2.0 * gwz * gwe;
}

double riemann_norm(const SplittingChart& chart, const Event& z, const Vec& zeta) {
    return std::sqrt(std::max(0.0, riemann_inner(chart, z, zeta, zeta)));
}

Vec w_field(int dim) {
    Vec w = Vec::Zero(dim);
    w(dim - 1) = 1.0;
    return w;
}

std::vector<Mat> metric_derivatives(const SplittingChart& chart, const Event& z) {
    const int N = chart.dim;
    const double h = chart.fd_step;
    std::vector<Mat> dg(N);
    for (int k = 0; k < N; ++k) {
        Event zp = z, zm = z;
        if (k < N - 1) {
            zp.x(k) += h;
            zm.x(k) -= h;
        } else {
            zp.t += h;
            zm.t -= h;
        }
        dg[k] = (metric_matrix(chart, zp) - metric_matrix(chart, zm)) / (2.0 * h);
    }
    return dg;
}

std::vector<Mat> christoffel(const SplittingChart& chart, const Event& z) {
    const int N = chart.dim;
    const Mat g = metric_matrix(chart, z);
    Eigen::FullPivLU<Mat> lu(g);
    if (!lu.isInvertible())
        throw Error(ErrorCode::DegenerateMetric, "metric matrix is singular at the requested event");
    const Mat ginv = lu.inverse();
    const std::vector<Mat> dg = metric_derivatives(chart, z);

    // First-kind symbols T_l(i,j) = (d_i g_lj + d_j g_li - d_l g_ij) / 2.
    // The first two summands swap under i <-> j and addition commutes, and
    // d_l g is exactly symmetric, so T_l -- and hence every Gamma^k -- is
    // exactly symmetric in its lower indices.
    std::vector<Mat> first(N, Mat(N, N));
    for (int l = 0; l < N; ++l)
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j)
                first[l](i, j) = 0.5 * (dg[i](l, j) + dg[j](l, i) - dg[l](i, j));

    std::vector<Mat> gamma(N, Mat::Zero(N, N));
    for (int k = 0; k < N; ++k)
        for (int l = 0; l < N; ++l)
            gamma[k] += ginv(k, l) * first[l];
    return gamma;
}

Vec christoffel_apply(const std::vector<Mat>& gamma, const Vec& u, const Vec& v) {
    const int N = static_cast<int>(gamma.size());
    Vec out(N);
    for (int k = 0; k < N; ++k)
        out(k) = u.dot(gamma[k] * v);
    return out;
}

Mat curvature_operator(const SplittingChart& chart, const Event& z, const Vec& v) {
    const int N = chart.dim;
    const double h = chart.fd_step;
    const std::vector<Mat> gamma = christoffel(chart, z);

    // dgamma[c][a] = d Gamma^a / d x^c by central differences of the
    // finite-difference Christoffel symbols themselves, so the curvature is
    // the honest derivative of the connection the integrators actually use.
    std::vector<std::vector<Mat>> dgamma(N);
    for (int c = 0; c < N; ++c) {
        Event zp = z, zm = z;
        if (c < N - 1) {
            zp.x(c) += h;
            zm.x(c) -= h;
        } else {
            zp.t += h;
            zm.t -= h;
        }
        const std::vector<Mat> gp = christoffel(chart, zp);
        const std::vector<Mat> gm = christoffel(chart, zm);
        dgamma[c].resize(N);
        for (int a = 0; a < N; ++a)
            dgamma[c][a] = (gp[a] - gm[a]) / (2.0 * h);
    }

    // M zeta = R(zeta, v) v with
    // R^a_bcd = d_c Gamma^a_db - d_d Gamma^a_cb + Gamma^a_ce Gamma^e_db
    //           - Gamma^a_de Gamma^e_cb, contracted with v^b v^d.
    const Vec q = christoffel_apply(gamma, v, v); // q_e = Gamma^e[v,v]
    Mat b(N, N); // b(e,c) = (Gamma^e v)_c = Gamma^e_cd v^d
    for (int e = 0; e < N; ++e)
        b.row(e) = (gamma[e] * v).transpose();

    Mat m(N, N);
    for (int a = 0; a < N; ++a) {
        for (int c = 0; c < N; ++c) {
            double t1 = v.dot(dgamma[c][a] * v); // d_c Gamma^a_db v^d v^b
            double t2 = 0.0;                     // d_d Gamma^a_cb v^d v^b
            for (int d = 0; d < N; ++d)
                t2 += v(d) * (dgamma[d][a] * v)(c);
            const double t3 = gamma[a].row(c).dot(q); // Gamma^a_ce q_e
            double t4 = 0.0;                          // Gamma^a_de v^d Gamma^e_cb v^b
            for (int e = 0; e < N; ++e)
                t4 += b(a, e) * b(e, c);
            m(a, c) = t1 - t2 + t3 - t4;
        }
    }
    return m;
}

Vec curvature_apply(const SplittingChart& chart, const Event& z,
                    const Vec& zeta, const Vec& v) {
    return curvature_operator(chart, z, v) * zeta;
}

} // namespace fermat
