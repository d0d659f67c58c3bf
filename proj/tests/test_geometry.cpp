#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "dunkl/geometry.hpp"
#include "dunkl/rng.hpp"
#include "oracles.hpp"

using namespace dunkl;

TEST_CASE("root system construction") {
    const auto c0 = build_root_system(1, {0.0});
    CHECK(c0.homogeneous_dimension() == 1.0);
    CHECK(c0.weight_at(std::vector{1.7}) == 1.0);
    CHECK(c0.group.size() == 2);

    const auto c1 = build_root_system(1, {1.0});
    CHECK(c1.homogeneous_dimension() == 3.0);
    CHECK(c1.weight_at(std::vector{1.0}) == doctest::Approx(2.0));
    CHECK(c1.weight_at(std::vector{0.0}) == 0.0);

    const auto c2 = build_root_system(2, {1.0, 0.5});
    CHECK(c2.homogeneous_dimension() == 5.0);
    CHECK(c2.roots.size() == 4);
    CHECK(c2.group.size() == 4);
    for (const auto& alpha : c2.roots) {
        double n2 = 0.0;
        for (double a : alpha) n2 += a * a;
        CHECK(n2 == doctest::Approx(2.0).epsilon(1e-13));
    }

    CHECK_THROWS(build_root_system(1, {-0.5}));
    CHECK_THROWS(build_root_system(2, {1.0}));
}

TEST_CASE("weight is G-invariant") {
    const auto cfg = build_root_system(2, {0.7, 1.3});
    Rng rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        const std::vector<double> x{rng.uniform(-3, 3), rng.uniform(-3, 3)};
        const double w = cfg.weight_at(x);
        for (std::uint32_t mask : cfg.group)
            CHECK(cfg.weight_at(cfg.reflect(mask, x)) == w);
    }
}

TEST_CASE("orbit distance matches brute force over the group") {
    const auto cfg = build_root_system(2, {1.0, 0.5});
    CHECK(orbit_distance(cfg, std::vector{1.0, 2.0}, std::vector{-1.0, 2.0}) == 0.0);
    CHECK(orbit_distance(cfg, std::vector{1.0, 2.0}, std::vector{2.0, 1.0}) ==
          doctest::Approx(std::sqrt(2.0)));
    Rng rng(11);
    for (int trial = 0; trial < 300; ++trial) {
        const std::vector<double> x{rng.uniform(-4, 4), rng.uniform(-4, 4)};
        const std::vector<double> y{rng.uniform(-4, 4), rng.uniform(-4, 4)};
        CHECK(orbit_distance(cfg, x, y) ==
              doctest::Approx(oracle::orbit_distance_brute(cfg, x, y)).epsilon(1e-13));
    }
}

TEST_CASE("orbit distance is a pseudo-metric") {
    const auto cfg = build_root_system(2, {0.25, 2.0});
    Rng rng(21);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::vector<double> x{rng.uniform(-4, 4), rng.uniform(-4, 4)};
        const std::vector<double> y{rng.uniform(-4, 4), rng.uniform(-4, 4)};
        const std::vector<double> z{rng.uniform(-4, 4), rng.uniform(-4, 4)};
        const double dxy = orbit_distance(cfg, x, y);
        CHECK(dxy == orbit_distance(cfg, y, x));
        CHECK(dxy <= orbit_distance(cfg, x, z) + orbit_distance(cfg, z, y) + 1e-12);
        double e2 = 0.0;
        for (int j = 0; j < 2; ++j) e2 += (x[j] - y[j]) * (x[j] - y[j]);
        CHECK(dxy <= std::sqrt(e2) + 1e-14);
    }
    CHECK(orbit_distance(cfg, std::vector{1.0, -2.0}, std::vector{1.0, -2.0}) == 0.0);
    CHECK(orbit_distance(cfg, std::vector{1.0, -2.0}, std::vector{-1.0, 2.0}) == 0.0);
}

TEST_CASE("orbit_contains") {
    const auto cfg = build_root_system(1, {1.0});
    const Ball b{{1.0}, 0.5};
    CHECK(orbit_contains(cfg, b, std::vector{1.0}));
    CHECK(orbit_contains(cfg, b, std::vector{-1.0}));
    CHECK_FALSE(orbit_contains(cfg, b, std::vector{0.3}));
}

TEST_CASE("grid quadrature: classical and weighted closed forms") {
    const auto c0 = build_root_system(1, {0.0});
    const auto g0 = build_grid(c0, 1.0, 8);
    GridFunction ones(g0.size(), 1.0);
    CHECK(integrate(g0, ones).real() == doctest::Approx(2.0).epsilon(1e-12));

    const auto c1 = build_root_system(1, {1.0});
    const auto g1 = build_grid(c1, 1.0, 8);
    GridFunction ones1(g1.size(), 1.0);
    // ∫_{-1}^{1} 2x^2 dx = 4/3.
    CHECK(integrate(g1, ones1).real() == doctest::Approx(4.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("grid quadrature integrates weighted monomials exactly") {
    const auto cfg = build_root_system(1, {0.75});
    const auto grid = build_grid(cfg, 2.0, 4);
    // ∫_{-2}^{2} x^{2m} 2^k |x|^{2k} dx = 2^{k+1} L^{2m+2k+1}/(2m+2k+1).
    const double k = 0.75, L = 2.0;
    for (int m = 0; m <= 4; ++m) {
        GridFunction f(grid.size());
        for (std::size_t i = 0; i < f.size(); ++i)
            f[i] = std::pow(grid.node(i)[0], 2 * m);
        const double expect =
            std::pow(2.0, k + 1.0) * std::pow(L, 2 * m + 2 * k + 1) / (2 * m + 2 * k + 1);
        CHECK(integrate(grid, f).real() == doctest::Approx(expect).epsilon(1e-10));
    }
}

TEST_CASE("grid quadrature vs adaptive oracle for the Gaussian") {
    const auto cfg = build_root_system(1, {1.0});
    const auto grid = build_grid(cfg, 12.0, 4);
    GridFunction f(grid.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double x = grid.node(i)[0];
        f[i] = std::exp(-x * x / 2.0);
    }
    const double oracle_ck = integrate_adaptive(
        [](double x) { return 2.0 * x * x * std::exp(-x * x / 2.0); }, -12.0, 12.0, 1e-12);
    CHECK(integrate(grid, f).real() == doctest::Approx(oracle_ck).epsilon(1e-8));
    // ∫ 2x^2 e^{-x^2/2} dx = 2 √(2π).
    CHECK(oracle_ck ==
          doctest::Approx(2.0 * std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-10));
}

TEST_CASE("grid is reflection-closed") {
    const auto cfg = build_root_system(2, {1.0, 0.5});
    const auto grid = build_grid(cfg, 2.0, 4);
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const auto i = static_cast<std::size_t>(rng.uniform() * grid.size());
        const auto x = grid.node(i);
        for (int axis = 0; axis < 2; ++axis) {
            const auto xr = grid.node(grid.reflect_index(i, axis));
            CHECK(xr[axis] == -x[axis]);
            CHECK(xr[1 - axis] == x[1 - axis]);
        }
        CHECK(grid.quad_weight(grid.reflect_index(i, 0)) ==
              doctest::Approx(grid.quad_weight(i)).epsilon(1e-14));
    }
}

TEST_CASE("ball volumes: closed forms, scaling, surrogate, doubling") {
    const auto c0 = build_root_system(1, {0.0});
    CHECK(ball_volume(c0, Ball{{0.7}, 0.4}) == doctest::Approx(0.8).epsilon(1e-10));

    const auto c1 = build_root_system(1, {1.0});
    // w(B(0,r)) = ∫ 2x^2 = 4r^3/3.
    CHECK(ball_volume(c1, Ball{{0.0}, 1.0}) == doctest::Approx(4.0 / 3.0).epsilon(1e-9));
    CHECK(ball_volume(c1, Ball{{0.0}, 0.5}) ==
          doctest::Approx(4.0 / 24.0).epsilon(1e-9));

    const auto c2 = build_root_system(2, {1.0, 0.5});
    const double Nh = c2.homogeneous_dimension();
    Rng rng(9);
    for (int trial = 0; trial < 12; ++trial) {
        const Ball b{{rng.uniform(-2, 2), rng.uniform(-2, 2)}, rng.uniform(0.2, 1.5)};
        const double v = ball_volume(c2, b);
        CHECK(v > 0.0);
        // Exact homogeneity w(B(tx, tr)) = t^N w(B(x,r)).
        const Ball b2{{2.0 * b.center[0], 2.0 * b.center[1]}, 2.0 * b.radius};
        CHECK(ball_volume(c2, b2) / v ==
              doctest::Approx(std::pow(2.0, Nh)).epsilon(1e-6));
        // Product surrogate comparability.
        const double s = ball_volume_surrogate(c2, b);
        CHECK(v / s > 0.05);
        CHECK(v / s < 20.0);
        // Doubling with exponent N.
        const Ball bd{b.center, 2.0 * b.radius};
        CHECK(ball_volume(c2, bd) <= 8.0 * std::pow(2.0, Nh) * v);
    }
    CHECK_THROWS(ball_volume(c1, Ball{{0.0}, -1.0}));
}

TEST_CASE("ball volume cache memoizes") {
    const auto cfg = build_root_system(1, {1.0});
    BallVolumeCache cache(cfg);
    const std::vector<double> c{0.3};
    const double v1 = cache(c, 0.7);
    const double v2 = cache(c, 0.7);
    CHECK(v1 == v2);
    CHECK(cache.entries() == 1);
    CHECK(v1 == doctest::Approx(ball_volume(cfg, Ball{{0.3}, 0.7})));
}

TEST_CASE("lp norms") {
    const auto cfg = build_root_system(2, {0.0, 0.0});
    const auto grid = build_grid(cfg, 1.0, 4);
    GridFunction zero(grid.size(), 0.0), one(grid.size(), 1.0);
    CHECK(lp_norm(grid, zero, 1.0) == 0.0);
    CHECK(lp_norm(grid, one, 1.0) == doctest::Approx(4.0).epsilon(1e-10));
    CHECK(lp_norm(grid, one, std::numeric_limits<double>::infinity()) == 1.0);

    // Disjoint supports: Pythagoras in L^2.
    GridFunction f(grid.size(), 0.0), g(grid.size(), 0.0), fg(grid.size(), 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto x = grid.node(i);
        if (x[0] > 0.0)
            f[i] = std::sin(x[0] + x[1]);
        else
            g[i] = std::cos(x[0] - 2.0 * x[1]);
        fg[i] = f[i] + g[i];
    }
    const double l2f = lp_norm(grid, f, 2.0), l2g = lp_norm(grid, g, 2.0);
    CHECK(lp_norm(grid, fg, 2.0) ==
          doctest::Approx(std::sqrt(l2f * l2f + l2g * l2g)).epsilon(1e-12));
}

TEST_CASE("axis derivatives reach stencil accuracy") {
    const auto cfg = build_root_system(1, {0.5});
    const auto grid = build_grid(cfg, 3.0, 8);
    GridFunction f(grid.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double x = grid.node(i)[0];
        f[i] = std::sin(2.0 * x);
    }
    const auto d1 = axis_derivative(grid, f, 0, 1);
    const auto d2 = axis_derivative(grid, f, 0, 2);
    double err1 = 0.0, err2 = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double x = grid.node(i)[0];
        err1 = std::max(err1, std::abs(d1[i] - 2.0 * std::cos(2.0 * x)));
        err2 = std::max(err2, std::abs(d2[i] + 4.0 * std::sin(2.0 * x)));
    }
    CHECK(err1 < 1e-8);
    CHECK(err2 < 1e-6);
}

TEST_CASE("schwartz seminorm") {
    const auto cfg = build_root_system(1, {1.0});
    const auto grid = build_grid(cfg, 6.0, 8);
    GridFunction zero(grid.size(), 0.0), gauss(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid.node(i)[0];
        gauss[i] = std::exp(-x * x);
    }
    CHECK(schwartz_seminorm(grid, zero, 2) == 0.0);
    CHECK(schwartz_seminorm(grid, gauss, 0) == doctest::Approx(1.0).epsilon(1e-6));

    // Dense-scan oracle for n = 1: sup (1+|x|) max(e^{-x^2}, 2|x|e^{-x^2}).
    double oracle_val = 0.0;
    for (int i = 0; i <= 600000; ++i) {
        const double x = -6.0 + 12.0 * i / 600000.0;
        const double e = std::exp(-x * x);
        oracle_val = std::max(oracle_val,
                              (1.0 + std::abs(x)) * std::max(e, 2.0 * std::abs(x) * e));
    }
    CHECK(schwartz_seminorm(grid, gauss, 1) ==
          doctest::Approx(oracle_val).epsilon(1e-4));
    CHECK_THROWS(schwartz_seminorm(grid, gauss, 5));
}
