#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "edgedim/specfun.hpp"
#include "oracles.hpp"

using Catch::Approx;
using namespace edgedim;

TEST_CASE("E1 matches quadrature reference values") {
    CHECK(specfun::exp_integral_e1(1.0) == Approx(0.2193839).epsilon(1e-6));
    CHECK(specfun::exp_integral_e1(1.0) ==
          Approx(oracles::e1_quadrature(1.0)).epsilon(1e-10));
    // small-x asymptote: E1(x) ~ -gamma - ln x
    CHECK(specfun::exp_integral_e1(1e-6) == Approx(13.2383).epsilon(1e-5));
    CHECK(specfun::exp_integral_e1(1e-6) ==
          Approx(-specfun::kEulerGamma - std::log(1e-6)).epsilon(1e-6));

    // quadrature agreement across both evaluation branches
    for (double x : {1e-4, 0.01, 0.3, 0.999, 1.001, 2.0, 5.0, 20.0, 50.0})
        CHECK(specfun::exp_integral_e1(x) ==
              Approx(oracles::e1_quadrature(x)).epsilon(1e-10));
}

TEST_CASE("E1 is positive, strictly decreasing, and vanishes") {
    double prev = std::numeric_limits<double>::infinity();
    for (double lx = -8.0; lx <= 2.5; lx += 0.05) {
        const double v = specfun::exp_integral_e1(std::pow(10.0, lx));
        CHECK(v > 0.0);
        CHECK(v < prev);
        prev = v;
    }
    CHECK(specfun::exp_integral_e1(500.0) < 1e-210);
}

TEST_CASE("E1 derivative identity") {
    // d/dx E1 = -e^{-x}/x by central differences on a log grid
    for (double lx = -8.0; lx <= std::log10(50.0); lx += 0.25) {
        const double x = std::pow(10.0, lx);
        const double h = 1e-5 * x;
        const double fd = (specfun::exp_integral_e1(x + h) -
                           specfun::exp_integral_e1(x - h)) / (2.0 * h);
        const double exact = -std::exp(-x) / x;
        CHECK(fd == Approx(exact).epsilon(1e-6));
    }
}

TEST_CASE("fused exp(x) E1(x) stays finite past the overflow threshold") {
    for (double x : {500.0, 700.0, 710.0, 1e4, 1e8}) {
        const double v = specfun::expx_e1(x);
        CHECK(std::isfinite(v));
        // asymptote e^x E1(x) ~ 1/x
        CHECK(v == Approx(1.0 / x).epsilon(2.0 / x));
    }
    CHECK(specfun::expx_e1(1e6) == Approx(1.0 / 1e6).epsilon(1e-5));
}

TEST_CASE("E1 domain errors") {
    CHECK_THROWS_AS(specfun::exp_integral_e1(0.0), std::domain_error);
    CHECK_THROWS_AS(specfun::exp_integral_e1(-1.0), std::domain_error);
}

TEST_CASE("Lambert W negative branch reference values") {
    const double neg_inv_e = -std::exp(-1.0);
    CHECK(specfun::lambert_w_m1(neg_inv_e) == -1.0);
    CHECK(specfun::lambert_w_m1(-0.3032653) == Approx(-1.7564).epsilon(1e-4));
    CHECK(specfun::lambert_w_m1(-0.3032653) ==
          Approx(oracles::wm1_bisection(-0.3032653)).epsilon(1e-10));
    CHECK(specfun::lambert_w_m1(-0.1) == Approx(-3.5772).epsilon(1e-4));
    CHECK(specfun::lambert_w_m1(-0.1) ==
          Approx(oracles::wm1_bisection(-0.1)).epsilon(1e-10));
}

TEST_CASE("Lambert W round trip and residual bound") {
    for (double w = -50.0; w <= -1.0; w += 0.25) {
        const double x = w * std::exp(w);
        const double back = specfun::lambert_w_m1(x);
        CHECK(std::fabs(back - w) < 1e-9);
        CHECK(std::fabs(back * std::exp(back) - x) <= 1e-12 * std::fabs(x));
    }
}

TEST_CASE("Lambert W strictly decreasing on (-1/e, 0)") {
    double prev = -1.0;
    for (double x = -0.36; x < -1e-8; x += 0.36 / 64.0) {
        const double w = specfun::lambert_w_m1(x);
        CHECK(w < prev + 1e-15);
        prev = w;
    }
}

TEST_CASE("Lambert W domain errors") {
    CHECK_THROWS_AS(specfun::lambert_w_m1(0.0), std::domain_error);
    CHECK_THROWS_AS(specfun::lambert_w_m1(0.5), std::domain_error);
    CHECK_THROWS_AS(specfun::lambert_w_m1(-1.0), std::domain_error);
}
