#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fermat/chart.hpp"
#include "support.hpp"

#include <cmath>
#include <cstring>

using namespace fermat;

TEST_CASE("catalog lists the built-in charts and rejects unknown names") {
    const auto names = catalog_names();
    CHECK(names.size() == 4);
    for (const char* expected :
         {"minkowski", "static_spherical", "conformally_stationary_demo", "product_sphere"})
        CHECK(std::find(names.begin(), names.end(), expected) != names.end());
    CHECK_THROWS_AS(catalog("no_such_chart"), Error);
    try {
        catalog("no_such_chart");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnknownCatalog);
    }
    // Unknown parameters are rejected rather than silently ignored.
    try {
        catalog("minkowski", {{"masss", 1.0}});
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Validation);
        CHECK(std::string(e.what()).find("masss") != std::string::npos);
    }
}

TEST_CASE("flat chart evaluates the product metric exactly") {
    const SplittingChart chart = catalog("minkowski");
    const Event z(Vec::Zero(2), 0.0);
    Vec null_v(3);
    null_v << 1.0, 0.0, 1.0;
    CHECK(eval_metric(chart, z, null_v, null_v) == doctest::Approx(0.0).epsilon(1e-15));
    const Vec w = w_field(3);
    CHECK(eval_metric(chart, z, w, w) == doctest::Approx(-1.0));
    // The auxiliary Riemannian product flips the sign of the clock component:
    // the null chord (1, 0 | 1) has squared length 2.
    CHECK(riemann_inner(chart, z, null_v, null_v) == doctest::Approx(2.0));
    CHECK(riemann_norm(chart, z, w) == doctest::Approx(1.0));
}

TEST_CASE("drifted chart reproduces the frozen cross-term value") {
    const SplittingChart chart = catalog("conformally_stationary_demo");
    const Event z(Vec::Zero(2), 0.0);
    Vec v(3);
    v << 1.0, 0.0, 1.0;
    // 1 + 2*0.3 - 1 = 0.6 with the default drift (0.3, 0).
    CHECK(eval_metric(chart, z, v, v) == doctest::Approx(0.6).epsilon(1e-15));
}

TEST_CASE("alpha is symmetric positive definite across the catalog") {
    auto gen = testsupport::rng(7);
    for (const auto& name : catalog_names()) {
        const SplittingChart chart = catalog(name);
        for (int trial = 0; trial < 25; ++trial) {
            Vec x = testsupport::random_vec(gen, chart.sdim(), 0.4);
            if (chart.name == "product_sphere")
                x(0) = 1.5 + 0.3 * x(0); // stay inside the colatitude band
            else if (chart.name == "static_spherical")
                x = Vec(x + 2.0 * Vec::Ones(x.size())); // keep r well above the center
            if (!chart.in_domain(x, 0.0))
                continue;
            const Mat a = chart.alpha(x, 0.0);
            CHECK((a - a.transpose()).cwiseAbs().maxCoeff() < 1e-14);
            const Eigen::SelfAdjointEigenSolver<Mat> es(a);
            CHECK(es.eigenvalues().minCoeff() > 0.0);
            // The full metric has Lorentzian signature: exactly one negative
            // direction, carried by the clock column.
            const Event z(x, 0.0);
            const Eigen::SelfAdjointEigenSolver<Mat> full(metric_matrix(chart, z));
            int negatives = 0;
            for (int i = 0; i < full.eigenvalues().size(); ++i)
                if (full.eigenvalues()(i) < 0.0)
                    ++negatives;
            CHECK(negatives == 1);
            // And the auxiliary product is positive on random nonzero vectors.
            const Vec zeta = testsupport::random_vec(gen, chart.dim);
            if (zeta.norm() > 1e-6)
                CHECK(riemann_inner(chart, z, zeta, zeta) > 0.0);
        }
    }
}

TEST_CASE("christoffel symbols are exactly symmetric in the lower pair") {
    auto gen = testsupport::rng(11);
    const SplittingChart charts[] = {catalog("static_spherical"),
                                     catalog("conformally_stationary_demo"),
                                     testsupport::conformal_chart()};
    for (const auto& chart : charts) {
        for (int trial = 0; trial < 10; ++trial) {
            Vec x = testsupport::random_vec(gen, chart.sdim(), 0.4);
            if (chart.name == "static_spherical")
                x = Vec(x + 2.0 * Vec::Ones(x.size()));
            const auto gamma = christoffel(chart, Event(x, 0.0));
            for (const Mat& g : gamma)
                for (int i = 0; i < g.rows(); ++i)
                    for (int j = 0; j < i; ++j) {
                        // Bitwise equality: the assembly is symmetric by
                        // construction, not merely up to rounding.
                        const double a = g(i, j), b = g(j, i);
                        CHECK(std::memcmp(&a, &b, sizeof(double)) == 0);
                    }
        }
    }
}

TEST_CASE("conformal chart matches the symbolic christoffel values") {
    // Closed forms computed by tests/oracles/conformal_christoffel.py:
    //   Gamma^0_00 = 1, Gamma^0_11 = -1, Gamma^1_01 = 1, others zero.
    const SplittingChart chart = testsupport::conformal_chart();
    Vec x(2);
    x << 0.1, -0.2;
    const auto gamma = christoffel(chart, Event(x, 0.0));
    CHECK(gamma[0](0, 0) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(gamma[0](1, 1) == doctest::Approx(-1.0).epsilon(1e-6));
    CHECK(gamma[1](0, 1) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(std::abs(gamma[1](0, 0)) < 1e-6);
    CHECK(std::abs(gamma[0](0, 1)) < 1e-6);
    // Clock rows and columns vanish for a static chart.
    CHECK(std::abs(gamma[2](0, 0)) < 1e-6);
    CHECK(std::abs(gamma[0](2, 2)) < 1e-6);
}

TEST_CASE("grid chart agrees with its functional source") {
    const SplittingChart func = testsupport::conformal_chart();
    const SplittingChart grid = testsupport::conformal_grid_chart(101);
    auto gen = testsupport::rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const Vec x = testsupport::random_vec(gen, 2, 0.4);
        const Event z(x, 0.0);
        // Multilinear interpolation of exp(2 x0) on cells of width 0.01 is
        // accurate to h^2/8 * max f'' ~ 1.4e-4 near the domain edge.
        CHECK((grid.alpha(x, 0.0) - func.alpha(x, 0.0)).cwiseAbs().maxCoeff() < 2e-4);
    }
    // Interpolation limits the Christoffel accuracy to the grid scale.
    Vec x(2);
    x << 0.1, -0.2;
    const auto gamma = christoffel(grid, Event(x, 0.0));
    CHECK(gamma[0](0, 0) == doctest::Approx(1.0).epsilon(2e-3));
    CHECK(gamma[0](1, 1) == doctest::Approx(-1.0).epsilon(2e-3));
}

TEST_CASE("metric derivative stencil converges at second order") {
    SplittingChart chart = testsupport::conformal_chart();
    Vec x(2);
    x << 0.15, 0.0;
    const Event z(x, 0.0);
    const double exact = 2.0 * std::exp(2.0 * 0.15); // d/dx0 of exp(2 x0)
    chart.fd_step = 2e-3;
    const double coarse = std::abs(metric_derivatives(chart, z)[0](0, 0) - exact);
    chart.fd_step = 1e-3;
    const double fine = std::abs(metric_derivatives(chart, z)[0](0, 0) - exact);
    CHECK(coarse / fine == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("time reflection is an involution on sampled values") {
    const SplittingChart chart = catalog("conformally_stationary_demo");
    const SplittingChart twice = time_reflect(time_reflect(chart));
    auto gen = testsupport::rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        const Vec x = testsupport::random_vec(gen, 2);
        const double t = testsupport::random_vec(gen, 1)(0);
        CHECK((twice.alpha(x, t) - chart.alpha(x, t)).cwiseAbs().maxCoeff() < 1e-15);
        CHECK((twice.delta(x, t) - chart.delta(x, t)).cwiseAbs().maxCoeff() < 1e-15);
    }
    // A single reflection flips the drift.
    const SplittingChart once = time_reflect(chart);
    const Vec x0 = Vec::Zero(2);
    CHECK(once.delta(x0, 0.0)(0) == doctest::Approx(-0.3));
}

TEST_CASE("degenerate interpolated metric is rejected") {
    std::vector<std::vector<double>> axes{{0.0, 1.0}, {0.0, 1.0}};
    std::vector<Mat> alphas(4, Mat(Mat::Zero(2, 2))); // rank-deficient alpha
    std::vector<Vec> deltas(4, Vec(Vec::Zero(2)));
    const SplittingChart chart = grid_chart(axes, alphas, deltas);
    Vec x(2);
    x << 0.5, 0.5;
    CHECK_THROWS_AS((void)christoffel(chart, Event(x, 0.0)), Error);
    try {
        (void)christoffel(chart, Event(x, 0.0));
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DegenerateMetric);
    }
}
