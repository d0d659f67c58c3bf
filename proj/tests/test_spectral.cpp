#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "dunkl/rng.hpp"
#include "dunkl/spectral.hpp"
#include "oracles.hpp"

using namespace dunkl;

namespace {

// Band-limited random test function: sample a smooth compact-ish spectrum on
// the frequency grid and pull it back. Forward/inverse accuracy on such
// functions is the contract the plan is built to.
GridFunction band_limited(const TransformPlan& plan, Rng& rng, double bandwidth = 1.3) {
    GridFunction hat(plan.grid.size());
    const double a0 = rng.uniform(0.5, 2.0), a2 = rng.uniform(-1.0, 1.0),
                 a4 = rng.uniform(-0.5, 0.5);
    for (std::size_t i = 0; i < hat.size(); ++i) {
        const auto xi = plan.grid.node(i);
        double n2 = 0.0;
        for (double v : xi) n2 += v * v;
        const double u = n2 / (bandwidth * bandwidth);
        hat[i] = (a0 + a2 * u + a4 * u * u) * std::exp(-u);
    }
    return inverse_transform(plan, hat);
}

GridFunction sample(const WeightedGrid& grid,
                    const std::function<std::complex<double>(std::span<const double>)>& f) {
    GridFunction out(grid.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(grid.node(i));
    return out;
}

double rel_l2_diff(const WeightedGrid& grid, const GridFunction& a,
                   const GridFunction& b) {
    GridFunction d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    return lp_norm(grid, d, 2.0) / lp_norm(grid, b, 2.0);
}

const TransformPlan& rank1_plan() {
    static const TransformPlan plan =
        build_plan(build_grid(build_root_system(1, {1.0}), 8.0, 4));
    return plan;
}

const TransformPlan& plan2d() {
    static const TransformPlan plan = build_plan(
        build_grid(build_root_system(2, {1.0, 0.5}), 7.0, 4, /*ppp=*/5, /*levels=*/5));
    return plan;
}

} // namespace

TEST_CASE("transform of the heat kernel is the Gaussian symbol") {
    const auto& plan = rank1_plan();
    const double t = 0.5;
    const auto ht = sample(plan.grid, [&](auto x) {
        return heat_kernel(plan.config(), t, x, std::vector{0.0});
    });
    const auto hat = forward_transform(plan, ht);
    for (std::size_t i = 0; i < hat.size(); ++i) {
        const double xi = plan.grid.node(i)[0];
        if (std::abs(xi) > 4.0) continue;
        const double expect = std::exp(-t * xi * xi) / plan.ck;
        CHECK(hat[i].real() == doctest::Approx(expect).epsilon(1e-6));
        CHECK(std::abs(hat[i].imag()) < 1e-10);
    }
}

TEST_CASE("plancherel and inversion on band-limited functions") {
    const auto& plan = rank1_plan();
    Rng rng(101);
    for (int trial = 0; trial < 5; ++trial) {
        const auto f = band_limited(plan, rng);
        const auto hat = forward_transform(plan, f);
        CHECK(lp_norm(plan.grid, hat, 2.0) ==
              doctest::Approx(lp_norm(plan.grid, f, 2.0)).epsilon(1e-6));
        CHECK(rel_l2_diff(plan.grid, inverse_transform(plan, hat), f) < 1e-6);
        // Double transform is a parity flip.
        const auto ff = forward_transform(plan, hat);
        GridFunction flipped(f.size());
        for (std::size_t i = 0; i < f.size(); ++i)
            flipped[i] = f[plan.grid.reflect_index(i, 0)];
        CHECK(rel_l2_diff(plan.grid, ff, flipped) < 1e-6);
    }
}

TEST_CASE("plancherel in two dimensions") {
    const auto& plan = plan2d();
    Rng rng(202);
    const auto f = band_limited(plan, rng);
    const auto hat = forward_transform(plan, f);
    CHECK(lp_norm(plan.grid, hat, 2.0) ==
          doctest::Approx(lp_norm(plan.grid, f, 2.0)).epsilon(1e-6));
    CHECK(rel_l2_diff(plan.grid, inverse_transform(plan, hat), f) < 1e-6);
}

TEST_CASE("radial real functions have real transforms") {
    const auto& plan = rank1_plan();
    const auto f = sample(plan.grid, [](auto x) { return std::exp(-x[0] * x[0]); });
    const auto hat = forward_transform(plan, f);
    double max_imag = 0.0, max_val = 0.0;
    for (const auto& v : hat) {
        max_imag = std::max(max_imag, std::abs(v.imag()));
        max_val = std::max(max_val, std::abs(v));
    }
    CHECK(max_imag / max_val < 1e-10);
}

TEST_CASE("transform_at matches the grid transform") {
    const auto& plan = rank1_plan();
    Rng rng(77);
    const auto f = band_limited(plan, rng);
    const auto hat = forward_transform(plan, f);
    for (int i : {100, 480, 700}) {
        const auto xi = plan.grid.node(static_cast<std::size_t>(i));
        const auto v = transform_at(plan, f, xi);
        CHECK(std::abs(v - hat[static_cast<std::size_t>(i)]) < 1e-10);
    }
}

TEST_CASE("serial and parallel plan applications agree bitwise") {
    const auto grid = build_grid(build_root_system(1, {0.5}), 4.0, 4, 6, 5);
    const auto p_par = build_plan(grid, true);
    const auto p_ser = build_plan(grid, false);
    Rng rng(8);
    GridFunction f(grid.size());
    for (auto& v : f) v = {rng.normal(), rng.normal()};
    const auto a = forward_transform(p_par, f);
    const auto b = forward_transform(p_ser, f);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].real() == b[i].real());
        CHECK(a[i].imag() == b[i].imag());
    }
}

TEST_CASE("laplacian and T_j intertwine with the transform") {
    const auto& plan = rank1_plan();
    Rng rng(303);
    const auto f = band_limited(plan, rng);
    const auto hat = forward_transform(plan, f);

    // Δ_k on the space side (finite differences + reflections) matches
    // multiplication by -||xi||^2 on the frequency side.
    const auto lap_hat = forward_transform(plan, apply_dunkl_laplacian(plan.grid, f));
    GridFunction expect(hat.size()), t_expect(hat.size());
    for (std::size_t i = 0; i < hat.size(); ++i) {
        const double xi = plan.grid.node(i)[0];
        expect[i] = -xi * xi * hat[i];
        t_expect[i] = std::complex<double>{0.0, xi} * hat[i];
    }
    CHECK(rel_l2_diff(plan.grid, lap_hat, expect) < 1e-5);

    const auto t_hat = forward_transform(plan, apply_dunkl_operator(plan.grid, f, 0));
    CHECK(rel_l2_diff(plan.grid, t_hat, t_expect) < 1e-5);
}

TEST_CASE("convolution: semigroup, commutativity, Young") {
    const auto& plan = rank1_plan();
    const auto& grid = plan.grid;
    const double t = 0.5, s = 0.75;
    const auto ht = sample(grid, [&](auto x) {
        return heat_kernel(plan.config(), t, x, std::vector{0.0});
    });
    const auto hs = sample(grid, [&](auto x) {
        return heat_kernel(plan.config(), s, x, std::vector{0.0});
    });
    const auto hts = sample(grid, [&](auto x) {
        return heat_kernel(plan.config(), t + s, x, std::vector{0.0});
    });
    const auto conv = convolve(plan, ht, hs);
    CHECK(rel_l2_diff(grid, conv, hts) < 1e-6);

    const auto conv2 = convolve(plan, hs, ht);
    double dmax = 0.0;
    for (std::size_t i = 0; i < conv.size(); ++i)
        dmax = std::max(dmax, std::abs(conv[i] - conv2[i]));
    CHECK(dmax / lp_norm(grid, conv, std::numeric_limits<double>::infinity()) < 1e-10);

    CHECK(lp_norm(grid, conv, 2.0) <=
          lp_norm(grid, ht, 1.0) * lp_norm(grid, hs, 2.0) * (1.0 + 1e-6));
}

TEST_CASE("translation basics and classical reduction") {
    const auto& plan = rank1_plan();
    Rng rng(404);
    const auto f = band_limited(plan, rng);
    const auto same = translate(plan, f, std::vector{0.0});
    CHECK(rel_l2_diff(plan.grid, same, f) < 1e-10);
    CHECK(lp_norm(plan.grid, same, 2.0) <=
          lp_norm(plan.grid, f, 2.0) * (1.0 + 1e-6));

    // k = 0: τ_x f(y) = f(x + y).
    const auto plan0 = build_plan(build_grid(build_root_system(1, {0.0}), 8.0, 4));
    const double shift = 0.75;
    const auto g = sample(plan0.grid, [](auto x) {
        return std::exp(-x[0] * x[0] / 2.0) * (1.0 + std::sin(x[0]));
    });
    const auto tg = translate(plan0, g, std::vector{shift});
    for (std::size_t i = 0; i < tg.size(); i += 37) {
        const double y = plan0.grid.node(i)[0];
        if (std::abs(y) > 4.0) continue;
        const double expect = std::exp(-(y + shift) * (y + shift) / 2.0) *
                              (1.0 + std::sin(y + shift));
        CHECK(std::abs(tg[i].real() - expect) < 1e-6);
    }
}

TEST_CASE("translation respects the orbit support theorem") {
    // Four-fold convolved bump: support stays in B(0,4) and the spectrum
    // decays like the 4th power of a single bump's, keeping frequency
    // truncation leakage far below the support-theorem tolerance.
    const auto plan =
        build_plan(build_grid(build_root_system(1, {1.0}), 10.0, 4));
    const double r = 4.0;
    const auto b = sample(plan.grid, [](auto x) {
        const double u = x[0];
        return std::abs(u) < 1.0 ? std::exp(-1.0 / (1.0 - u * u)) : 0.0;
    });
    const auto b2 = convolve(plan, b, b);
    const auto f = convolve(plan, b2, b2);
    const double fsup = lp_norm(plan.grid, f, std::numeric_limits<double>::infinity());
    const std::vector<double> x{6.0};
    const auto tf = translate(plan, f, x);
    // τ_x f(-y) must vanish whenever d(x,y) > r (+ small grid slack).
    const double slack = 0.15;
    for (std::size_t i = 0; i < tf.size(); ++i) {
        const double my = -plan.grid.node(i)[0];  // tf[i] = τ_x f(-(my))
        const std::vector<double> y{my};
        if (orbit_distance(plan.config(), x, y) > r + slack)
            CHECK(std::abs(tf[i]) < 1e-6 * fsup);
    }
}

TEST_CASE("heat kernel closed form: classical limit, positivity, scaling, mass") {
    const auto c0 = build_root_system(1, {0.0});
    // k = 0: classical Gaussian kernel.
    CHECK(heat_kernel(c0, 0.7, std::vector{1.2}, std::vector{-0.3}) ==
          doctest::Approx(std::exp(-1.5 * 1.5 / (4.0 * 0.7)) /
                          std::sqrt(4.0 * std::numbers::pi * 0.7))
              .epsilon(1e-12));

    const auto c1 = build_root_system(1, {1.0});
    Rng rng(505);
    for (int trial = 0; trial < 50; ++trial) {
        const std::vector<double> x{rng.uniform(-3, 3)}, y{rng.uniform(-3, 3)};
        const double t = rng.uniform(0.1, 3.0);
        const double h = heat_kernel(c1, t, x, y);
        CHECK(h > 0.0);
        CHECK(h == doctest::Approx(heat_kernel(c1, t, y, x)).epsilon(1e-12));
        // h_{λ² t}(λx, λy) = λ^{-N} h_t(x,y).
        const double lam = 2.0;
        CHECK(heat_kernel(c1, lam * lam * t, std::vector{lam * x[0]},
                          std::vector{lam * y[0]}) ==
              doctest::Approx(std::pow(lam, -c1.homogeneous_dimension()) * h)
                  .epsilon(1e-10));
    }

    // Mass one on a wide dedicated grid.
    const auto wide = build_grid(c1, 20.0, 4);
    for (double t : {0.25, 1.0, 4.0})
        for (double x0 : {0.0, 0.9, -2.3}) {
            const auto col = sample(wide, [&](auto y) {
                return heat_kernel(c1, t, std::vector{x0}, y);
            });
            CHECK(integrate(wide, col).real() == doctest::Approx(1.0).epsilon(1e-6));
        }
    CHECK_THROWS(heat_kernel(c1, 0.0, std::vector{0.0}, std::vector{0.0}));
}

TEST_CASE("heat kernel solves the heat equation") {
    const auto cfg = build_root_system(1, {1.0});
    const auto grid = build_grid(cfg, 8.0, 4);
    const double t = 0.8, eps = 1e-4;
    const std::vector<double> x0{0.6};
    const auto slice = sample(grid, [&](auto y) { return heat_kernel(cfg, t, x0, y); });
    const auto lap = apply_dunkl_laplacian(grid, slice);
    const auto up = sample(grid, [&](auto y) { return heat_kernel(cfg, t + eps, x0, y); });
    const auto dn = sample(grid, [&](auto y) { return heat_kernel(cfg, t - eps, x0, y); });
    GridFunction dt(grid.size());
    for (std::size_t i = 0; i < dt.size(); ++i) dt[i] = (up[i] - dn[i]) / (2.0 * eps);
    CHECK(rel_l2_diff(grid, dt, lap) < 1e-4);
}

TEST_CASE("heat semigroup on the spectral side") {
    const auto& plan = rank1_plan();
    Rng rng(606);
    const auto f = band_limited(plan, rng);
    // Identity at t = 0, semigroup property, contraction in L^1, L^2, L^inf.
    const auto id = heat_apply(plan, 0.0, f);
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(id[i] == f[i]);

    // Semigroup property on a wide grid: heat flow spreads mass toward the
    // domain boundary, so the truncation tail must be pushed further out.
    {
        const auto wide =
            build_plan(build_grid(build_root_system(1, {1.0}), 12.0, 4));
        Rng rng2(607);
        const auto g = band_limited(wide, rng2);
        const auto hth = heat_apply(wide, 0.25, heat_apply(wide, 0.25, g));
        const auto h05 = heat_apply(wide, 0.5, g);
        CHECK(rel_l2_diff(wide.grid, hth, h05) < 1e-8);
    }
    const auto h1 = heat_apply(plan, 1.0, f);

    for (double p : {1.0, 2.0, std::numeric_limits<double>::infinity()})
        CHECK(lp_norm(plan.grid, h1, p) <= lp_norm(plan.grid, f, p) * (1.0 + 1e-5));
    CHECK_THROWS(heat_apply(plan, -1.0, f));

    // Spectral route vs direct kernel quadrature.
    const double t = 0.6;
    const auto hf = heat_apply(plan, t, f);
    for (int i : {200, 480, 731}) {
        const auto x = plan.grid.node(static_cast<std::size_t>(i));
        std::complex<double> direct = 0.0;
        for (std::size_t j = 0; j < plan.grid.size(); ++j)
            direct += heat_kernel(plan.config(), t, x, plan.grid.node(j)) * f[j] *
                      plan.grid.quad_weight(j);
        CHECK(std::abs(direct - hf[static_cast<std::size_t>(i)]) /
                  lp_norm(plan.grid, hf, std::numeric_limits<double>::infinity()) <
              1e-5);
    }
}

TEST_CASE("q operator norm check") {
    const auto& plan = rank1_plan();
    // Smallest t limited by the grid's frequency reach (need t^2 xi^2 to
    // cross 1 somewhere on the grid).
    const std::vector<double> ts{0.125, 0.5, 1.0, 2.0, 8.0, 32.0};
    const auto c0 = q_operator_norm_check(plan, 0, ts);
    CHECK(c0.analytic_sup == doctest::Approx(1.0 / std::exp(1.0)));
    CHECK(c0.max_over_t <= c0.analytic_sup * (1.0 + 1e-12));
    for (double v : c0.per_t) CHECK(v == doctest::Approx(c0.analytic_sup).epsilon(1e-3));

    const auto c1 = q_operator_norm_check(plan, 1, ts);
    CHECK(c1.analytic_sup == doctest::Approx(4.0 / std::exp(2.0)));
    CHECK(c1.max_over_t <= c1.analytic_sup * (1.0 + 1e-12));
}

TEST_CASE("q kernel decay report") {
    const auto& plan = rank1_plan();
    std::vector<std::vector<double>> xs, ys;
    for (double x : {0.5, 1.0, 2.0})
        for (double d : {0.0, 0.5, 1.0, 1.5, 2.0, 3.0}) {
            xs.push_back({x});
            ys.push_back({x + d});
        }
    const std::vector<double> ts{0.5, 1.0};
    const auto rep = q_kernel_bound_report(plan, ts, xs, ys);
    CHECK(rep.pass);
    CHECK(rep.fitted_decay > 0.0);
    CHECK(rep.n_samples >= 10);

    // Classical case: Gaussian decay gives a fitted rate well above 1/8.
    const auto plan0 = build_plan(build_grid(build_root_system(1, {0.0}), 8.0, 4));
    const auto rep0 = q_kernel_bound_report(plan0, ts, xs, ys);
    CHECK(rep0.pass);
    CHECK(rep0.fitted_decay >= 0.125);
}
