#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>

#include "dunkl/rng.hpp"
#include "dunkl/special.hpp"
#include "oracles.hpp"

using dunkl::Rng;

TEST_CASE("hyp1f1 positive-series log form matches plain Taylor") {
    const double cases[][3] = {
        {1.0, 3.0, 0.5}, {1.5, 2.0, 4.0}, {0.25, 1.5, 10.0}, {2.0, 5.0, 25.0}};
    for (const auto& c : cases) {
        const double ref = dunkl::hyp1f1_series(c[0], c[1], c[2]);
        CHECK(dunkl::hyp1f1_positive_log(c[0], c[1], c[2]) ==
              doctest::Approx(std::log(ref)).epsilon(1e-13));
    }
    CHECK(dunkl::hyp1f1_positive_log(1.0, 2.0, 0.0) == 0.0);
}

TEST_CASE("hyp1f1 log form survives huge arguments") {
    // 1F1(a; b; z) ~ Gamma(b)/Gamma(a) e^z z^{a-b} for z -> +inf.
    const double a = 1.5, b = 3.5, z = 2000.0;
    const double expect =
        std::lgamma(b) - std::lgamma(a) + z + (a - b) * std::log(z);
    CHECK(dunkl::hyp1f1_positive_log(a, b, z) ==
          doctest::Approx(expect).epsilon(1e-3));
}

TEST_CASE("rank-one kernel matches the eigenfunction series oracle") {
    Rng rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        const double k = rng.uniform(0.05, 3.0);
        const double u = rng.uniform(-5.0, 5.0);
        const double v = rng.uniform(-5.0, 5.0);
        const double ref = oracle::rank1_kernel_series_real(k, u, v);
        CHECK(dunkl::rank1_kernel(k, u, v) ==
              doctest::Approx(ref).epsilon(1e-12));
    }
}

TEST_CASE("rank-one kernel special values") {
    // k = 0 collapses to the exponential.
    CHECK(dunkl::rank1_kernel(0.0, 1.3, -0.7) ==
          doctest::Approx(std::exp(1.3 * -0.7)));
    // E_k(u, 0) = 1.
    CHECK(dunkl::rank1_kernel(1.0, 2.5, 0.0) == 1.0);
    // E_1(1, 1) = cosh(1) in the rank-one k = 1 case.
    CHECK(dunkl::rank1_kernel(1.0, 1.0, 1.0) ==
          doctest::Approx(std::cosh(1.0)).epsilon(1e-13));
    // Symmetry and reflection: E(u, v) = E(v, u), E(-u, -v) = E(u, v).
    CHECK(dunkl::rank1_kernel(0.7, 1.2, 3.4) ==
          doctest::Approx(dunkl::rank1_kernel(0.7, 3.4, 1.2)));
    CHECK(dunkl::rank1_kernel(0.7, -1.2, -3.4) ==
          doctest::Approx(dunkl::rank1_kernel(0.7, 1.2, 3.4)));
}

TEST_CASE("rank-one kernel log form is stable for large arguments") {
    // E_k(u, v) <= e^{uv} with near equality as uv -> +inf, so the log should
    // track uv; naive evaluation of either factor would overflow here.
    const double k = 0.8, u = 32.0, v = 32.0;
    const double lg = dunkl::rank1_kernel_log(k, u, v);
    CHECK(std::isfinite(lg));
    CHECK(lg < u * v);
    CHECK(lg > u * v - 2.0 * k * std::log(u * v) - 10.0);
}

TEST_CASE("imaginary-argument kernel matches the series oracle") {
    Rng rng(77);
    for (int trial = 0; trial < 200; ++trial) {
        const double k = rng.uniform(0.05, 3.0);
        const double u = rng.uniform(-5.0, 5.0);
        const double xi = rng.uniform(-5.0, 5.0);
        const auto ref = oracle::rank1_kernel_series(k, u, {0.0, -xi});
        const auto got = dunkl::rank1_kernel_imag(k, u, xi);
        // The oracle series alternates, so compare absolutely (|E| <= 1).
        CHECK(std::abs(got - ref) < 1e-10);
    }
}

TEST_CASE("imaginary-argument kernel is bounded by one") {
    Rng rng(13);
    for (int trial = 0; trial < 500; ++trial) {
        const double k = rng.uniform(0.0, 4.0);
        const double u = rng.uniform(-40.0, 40.0);
        const double xi = rng.uniform(-40.0, 40.0);
        CHECK(std::abs(dunkl::rank1_kernel_imag(k, u, xi)) <= 1.0 + 1e-12);
    }
}

TEST_CASE("imaginary-argument kernel reduces to plane wave at k = 0") {
    const auto got = dunkl::rank1_kernel_imag(0.0, 1.7, 2.3);
    CHECK(got.real() == doctest::Approx(std::cos(1.7 * 2.3)));
    CHECK(got.imag() == doctest::Approx(-std::sin(1.7 * 2.3)));
}

TEST_CASE("normalized Bessel basics") {
    CHECK(dunkl::bessel_j_normalized(0.5, 1e-9) == doctest::Approx(1.0));
    // j_{1/2}(z) = sin(z)/z.
    CHECK(dunkl::bessel_j_normalized(0.5, 2.0) ==
          doctest::Approx(std::sin(2.0) / 2.0).epsilon(1e-12));
    // j_{3/2}(z) = 3 (sin z - z cos z) / z^3.
    const double z = 1.3;
    CHECK(dunkl::bessel_j_normalized(1.5, z) ==
          doctest::Approx(3.0 * (std::sin(z) - z * std::cos(z)) / (z * z * z))
              .epsilon(1e-12));
    // Even in z.
    CHECK(dunkl::bessel_j_normalized(0.25, -3.0) ==
          doctest::Approx(dunkl::bessel_j_normalized(0.25, 3.0)));
    // Negative order branch: j_{-1/2}(z) = cos(z).
    CHECK(dunkl::bessel_j_normalized(-0.5, 1.1) ==
          doctest::Approx(std::cos(1.1)).epsilon(1e-12));
}
