#include "fermat/chart.hpp"

#include <cmath>
#include <set>

namespace fermat {

namespace {

double take_param(std::map<std::string, double> params, const std::string& key,
                  double fallback, std::set<std::string>* used) {
    used->insert(key);
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

void reject_unknown(const std::map<std::string, double>& params,
                    const std::set<std::string>& used, const std::string& chart) {
    for (const auto& [key, value] : params) {
        (void)value;
        if (!used.count(key))
            throw Error(ErrorCode::Validation,
                        "unknown parameter '" + key + "' for chart '" + chart + "'");
    }
}

SplittingChart make_minkowski(const std::map<std::string, double>& params) {
    std::set<std::string> used;
    const int dim = static_cast<int>(take_param(params, "dim", 3, &used));
    reject_unknown(params, used, "minkowski");
    if (dim < 3)
        throw Error(ErrorCode::Validation, "minkowski requires dim >= 3");
    SplittingChart chart;
    chart.dim = dim;
    chart.name = "minkowski";
    const int n = dim - 1;
    chart.alpha = [n](const Vec&, double) { return Mat::Identity(n, n); };
    chart.delta = [n](const Vec&, double) { return Vec::Zero(n); };
    chart.in_domain = [](const Vec&, double) { return true; };
    return chart;
}

// Static spherically symmetric chart with optical profile
//   A(r) = ((1 + M/2r)^3 / (1 - M/2r))^2,
// the exterior of a mass M in isotropic coordinates after normalizing the
// lapse into the time coordinate.  Light bends by 4M/b + O(M^2) at impact
// parameter b, the profile is singular at r = M/2, and f(r) = sqrt(A) r has
// its single stationary point (the light ring) at r = (2 + sqrt(3)) M / 2.
SplittingChart make_static_spherical(const std::map<std::string, double>& params) {
    std::set<std::string> used;
    const int dim = static_cast<int>(take_param(params, "dim", 3, &used));
    const double mass = take_param(params, "mass", 0.01, &used);
    reject_unknown(params, used, "static_spherical");
    if (dim < 3)
        throw Error(ErrorCode::Validation, "static_spherical requires dim >= 3");
    if (mass < 0.0)
        throw Error(ErrorCode::Validation, "static_spherical requires mass >= 0");
    SplittingChart chart;
    chart.dim = dim;
    chart.name = "static_spherical";
    const int n = dim - 1;
    chart.alpha = [n, mass](const Vec& x, double) {
        const double r = x.norm();
        const double u = mass / (2.0 * r);
        const double num = 1.0 + u;
        const double den = 1.0 - u;
        const double a = std::pow(num * num * num / den, 2);
        return Mat(a * Mat::Identity(n, n));
    };
    chart.delta = [n](const Vec&, double) { return Vec::Zero(n); };
    chart.in_domain = [mass](const Vec& x, double) { return x.norm() > 0.5 * mass; };
    return chart;
}

// Flat spatial slices with a constant cross term: the simplest chart where
// the arrival-time lift feels the delta coupling.
SplittingChart make_conformally_stationary_demo(const std::map<std::string, double>& params) {
    std::set<std::string> used;
    const int dim = static_cast<int>(take_param(params, "dim", 3, &used));
    if (dim < 3)
        throw Error(ErrorCode::Validation, "conformally_stationary_demo requires dim >= 3");
    const int n = dim - 1;
    Vec d0 = Vec::Zero(n);
    d0(0) = take_param(params, "delta1", 0.3, &used);
    for (int k = 1; k < n; ++k)
        d0(k) = take_param(params, "delta" + std::to_string(k + 1), 0.0, &used);
    reject_unknown(params, used, "conformally_stationary_demo");
    if (d0.norm() >= 1.0 - 1e-12)
        throw Error(ErrorCode::Validation,
                    "conformally_stationary_demo requires |delta| < 1 to keep the reference field timelike");
    SplittingChart chart;
    chart.dim = dim;
    chart.name = "conformally_stationary_demo";
    chart.alpha = [n](const Vec&, double) { return Mat::Identity(n, n); };
    chart.delta = [d0](const Vec&, double) { return d0; };
    chart.in_domain = [](const Vec&, double) { return true; };
    return chart;
}

// Static product of a round sphere (colatitude/longitude coordinates, radius
// `radius`) with the time axis.  The coordinate strip excludes the poles and
// covers a few longitude wraps, which is enough for the curvature and
// conjugate-point reference solutions.
SplittingChart make_product_sphere(const std::map<std::string, double>& params) {
    std::set<std::string> used;
    const double radius = take_param(params, "radius", 1.0, &used);
    reject_unknown(params, used, "product_sphere");
    if (radius <= 0.0)
        throw Error(ErrorCode::Validation, "product_sphere requires radius > 0");
    SplittingChart chart;
    chart.dim = 3;
    chart.name = "product_sphere";
    chart.alpha = [radius](const Vec& x, double) {
        Mat a = Mat::Zero(2, 2);
        const double st = std::sin(x(0));
        a(0, 0) = radius * radius;
        a(1, 1) = radius * radius * st * st;
        return a;
    };
    chart.delta = [](const Vec&, double) { return Vec::Zero(2); };
    chart.in_domain = [](const Vec& x, double) {
        return x(0) > 0.2 && x(0) < M_PI - 0.2 && std::abs(x(1)) < 10.5;
    };
    return chart;
}

} // namespace

SplittingChart catalog(const std::string& name,
                       const std::map<std::string, double>& params) {
    if (name == "minkowski") return make_minkowski(params);
    if (name == "static_spherical") return make_static_spherical(params);
    if (name == "conformally_stationary_demo") return make_conformally_stationary_demo(params);
    if (name == "product_sphere") return make_product_sphere(params);
    throw Error(ErrorCode::UnknownCatalog, "no catalog chart named '" + name + "'");
}

std::vector<std::string> catalog_names() {
    return {"minkowski", "static_spherical", "conformally_stationary_demo", "product_sphere"};
}

SplittingChart grid_chart(const std::vector<std::vector<double>>& axes,
                          const std::vector<Mat>& alpha_values,
                          const std::vector<Vec>& delta_values) {
    const int n = static_cast<int>(axes.size());
    if (n < 2)
        throw Error(ErrorCode::Validation, "grid chart needs at least two spatial axes");
    std::size_t nodes = 1;
    for (const auto& axis : axes) {
        if (axis.size() < 2)
            throw Error(ErrorCode::Validation, "each grid axis needs at least two coordinates");
        for (std::size_t i = 1; i < axis.size(); ++i)
            if (axis[i] <= axis[i - 1])
                throw Error(ErrorCode::Validation, "grid axis coordinates must be strictly increasing");
        nodes *= axis.size();
    }
    if (alpha_values.size() != nodes || delta_values.size() != nodes)
        throw Error(ErrorCode::Validation, "grid chart value tables do not match the node count");
    for (const Mat& a : alpha_values)
        if (a.rows() != n || a.cols() != n)
            throw Error(ErrorCode::Validation, "grid alpha entries must be (dim-1) x (dim-1)");
    for (const Vec& d : delta_values)
        if (d.size() != n)
            throw Error(ErrorCode::Validation, "grid delta entries must have dim-1 components");

    // Row-major strides, last axis fastest.
    std::vector<std::size_t> stride(n, 1);
    for (int d = n - 2; d >= 0; --d)
        stride[d] = stride[d + 1] * axes[d + 1].size();

    auto locate = [axes](const Vec& x, std::vector<int>* cell, std::vector<double>* w) {
        for (std::size_t d = 0; d < axes.size(); ++d) {
            const auto& axis = axes[d];
            auto it = std::upper_bound(axis.begin(), axis.end(), x(static_cast<int>(d)));
            int hi = static_cast<int>(it - axis.begin());
            int lo = std::clamp(hi - 1, 0, static_cast<int>(axis.size()) - 2);
            (*cell)[d] = lo;
            (*w)[d] = (x(static_cast<int>(d)) - axis[lo]) / (axis[lo + 1] - axis[lo]);
        }
    };

    auto interp = [=](const Vec& x, auto&& value_of) {
        std::vector<int> cell(n);
        std::vector<double> w(n);
        locate(x, &cell, &w);
        auto acc = value_of(std::size_t{0});
        acc.setZero();
        for (int corner = 0; corner < (1 << n); ++corner) {
            double weight = 1.0;
            std::size_t idx = 0;
            for (int d = 0; d < n; ++d) {
                const int up = (corner >> d) & 1;
                weight *= up ? w[d] : 1.0 - w[d];
                idx += stride[d] * static_cast<std::size_t>(cell[d] + up);
            }
            acc += weight * value_of(idx);
        }
        return acc;
    };

    SplittingChart chart;
    chart.dim = n + 1;
    chart.name = "grid";
    chart.alpha = [interp, alpha_values](const Vec& x, double) {
        return interp(x, [&](std::size_t i) { return alpha_values[i]; });
    };
    chart.delta = [interp, delta_values](const Vec& x, double) {
        return interp(x, [&](std::size_t i) { return delta_values[i]; });
    };
    chart.in_domain = [axes](const Vec& x, double) {
        for (std::size_t d = 0; d < axes.size(); ++d)
            if (x(static_cast<int>(d)) < axes[d].front() || x(static_cast<int>(d)) > axes[d].back())
                return false;
        return true;
    };
    return chart;
}

SplittingChart time_reflect(const SplittingChart& chart) {
    SplittingChart out = chart;
    out.name = chart.name + "_time_reflected";
    const auto alpha = chart.alpha;
    const auto delta = chart.delta;
    const auto domain = chart.in_domain;
    out.alpha = [alpha](const Vec& x, double t) { return alpha(x, -t); };
    out.delta = [delta](const Vec& x, double t) { return Vec(-delta(x, -t)); };
    out.in_domain = [domain](const Vec& x, double t) { return domain(x, -t); };
    return out;
}

} // namespace fermat
