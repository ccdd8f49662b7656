#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>

#include "edgedim/queueing.hpp"
#include "oracles.hpp"

using Catch::Approx;
using namespace edgedim;

TEST_CASE("tau reference value and defining identity") {
    CHECK(tau(0.5) == Approx(3.5128).epsilon(1e-4));
    CHECK(tau(0.5) == Approx(oracles::tau_bisection(0.5)).epsilon(1e-10));
    for (double rho = 0.01; rho < 0.995; rho += 0.01) {
        const double tv = tau(rho);
        CHECK(tv > 1.0);
        const double lhs = rho * tv * std::exp(-rho * tv);
        const double rhs = rho * std::exp(-rho);
        CHECK(lhs == Approx(rhs).margin(1e-12));
    }
    CHECK(tau(0.999999) == Approx(1.0).margin(1e-2));
    CHECK_THROWS_AS(tau(0.0), std::domain_error);
    CHECK_THROWS_AS(tau(1.0), std::domain_error);
}

TEST_CASE("exact waiting-time CCDF reference values") {
    const QueueModel q = QueueModel::from_load_service(0.5, 1.0);
    CHECK(mdone_wait_ccdf(q, 0.0) == Approx(0.5));  // P(wait > 0) = rho
    CHECK(mdone_wait_ccdf(q, 1.0) == Approx(1.0 - 0.5 * std::exp(0.5)).epsilon(1e-12));
    CHECK(mdone_wait_ccdf(q, 1.0) == Approx(0.17564).epsilon(1e-4));
    CHECK(mdone_wait_ccdf(q, 20.0) < 1e-9);
    // T=0 equals rho for any load
    for (double rho : {0.1, 0.3, 0.7, 0.9})
        CHECK(mdone_wait_ccdf(QueueModel::from_load_service(rho, 2.0), 0.0) == Approx(rho));
    CHECK_THROWS_AS(mdone_wait_ccdf(q, -1.0), std::domain_error);
    CHECK_THROWS_AS(mdone_wait_ccdf(QueueModel::from_load_service(1.0, 1.0), 0.0),
                    std::domain_error);
}

// Convexity sets in a little past the service-time breakpoints: at high
// load the curve is measurably concave just after T = T_s (and faintly
// after 2 T_s), so the second-difference check starts at 3 T_s.
TEST_CASE("exact CCDF is monotone in T and eventually convex") {
    for (double rho : {0.2, 0.5, 0.8, 0.95}) {
        const QueueModel q = QueueModel::from_load_service(rho, 1.0);
        double prev = 1.0;
        const double dt = 0.05;
        std::vector<double> vals;
        for (double T = 0.0; T <= 15.0; T += dt) {
            const double v = mdone_wait_ccdf(q, T);
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
            CHECK(v <= prev + 1e-12);
            prev = v;
            vals.push_back(v);
        }
        for (std::size_t i = static_cast<std::size_t>(3.0 / dt) + 1;
             i + 1 < vals.size(); ++i)
            CHECK(vals[i + 1] - 2.0 * vals[i] + vals[i - 1] >= -1e-9);
    }
}

TEST_CASE("tail approximation reference values and scaling") {
    const QueueModel q = QueueModel::from_load_service(0.5, 1.0);
    const double tv = oracles::tau_bisection(0.5);
    CHECK(henk_wait_ccdf(q, 0.0) == Approx(0.66101).epsilon(1e-4));
    CHECK(henk_wait_ccdf(q, 0.0) == Approx(0.5 / (0.5 * tv - 1.0)).epsilon(1e-9));
    CHECK(henk_wait_ccdf(q, 1.0) == Approx(0.18818).epsilon(1e-4));
    CHECK(henk_wait_ccdf(q, 1.0) ==
          Approx(henk_wait_ccdf(q, 0.0) * std::exp(-0.5 * (tv - 1.0))).epsilon(1e-9));
    // (lamA, T) -> (lamA/c, cT) leaves the tail unchanged at fixed rho
    for (double c : {0.1, 10.0, 1000.0}) {
        const QueueModel qs = QueueModel::from_load_service(0.5, c);
        CHECK(henk_wait_ccdf(qs, c * 1.0) == Approx(henk_wait_ccdf(q, 1.0)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(henk_wait_ccdf(QueueModel::from_load_service(1e-8, 1.0), 0.0),
                    std::domain_error);
}

TEST_CASE("worst-error argument closed form") {
    const QueueModel q = QueueModel::from_load_service(0.5, 1.0);
    CHECK(max_error_argument(q) == Approx(0.68355).epsilon(1e-4));
    // linear in the service time
    for (double ts : {0.01, 0.3, 100.0}) {
        const QueueModel qs = QueueModel::from_load_service(0.5, ts);
        CHECK(max_error_argument(qs) == Approx(ts * max_error_argument(q)).epsilon(1e-12));
    }
    // dense scan confirms the argmax within grid resolution
    for (double rho : {0.3, 0.5, 0.8}) {
        const QueueModel qr = QueueModel::from_load_service(rho, 1.0);
        const double dt = 1e-4;
        double best_t = 0.0, best_e = -1.0;
        for (double T = 0.0; T <= 20.0; T += dt) {
            const double e = mdone_wait_ccdf(qr, T) - henk_wait_ccdf(qr, T);
            if (e > best_e) { best_e = e; best_t = T; }
        }
        CHECK(std::fabs(best_t - max_error_argument(qr)) <= 2.0 * dt);
    }
}

TEST_CASE("certified approximation gap at the reference load") {
    const std::array<double, 1> grid{0.5};
    const auto pts = certify_error_bound(grid);
    REQUIRE(pts.size() == 1);
    CHECK(pts[0].max_error() == Approx(0.0163).epsilon(2e-2));
    CHECK(pts[0].error_at_argmax == Approx(pts[0].error_dense_scan).margin(1e-4));
    CHECK(pts[0].max_error() <= kHenkCompensation);
}

TEST_CASE("compensated tail dominates the exact CCDF") {
    for (double rho : {0.1, 0.42, 0.7, 0.9, 0.97}) {
        const QueueModel q = QueueModel::from_load_service(rho, 1.0);
        for (double T = 0.0; T <= 20.0; T += 0.1)
            CHECK(mdone_wait_ccdf(q, T) <= henk_wait_ccdf(q, T) + kHenkCompensation + 1e-12);
    }
}

TEST_CASE("high-load large-T evaluation stays a probability") {
    // the alternating series is unusable here; the certified upper bound
    // must still come back inside [0,1] and above the true tail
    for (double rho : {0.95, 0.977, 0.99}) {
        const QueueModel q = QueueModel::from_load_service(rho, 1.0);
        double prev = 1.0;
        for (double T : {30.0, 45.0, 61.0, 100.0, 1000.0}) {
            const double v = mdone_wait_ccdf(q, T);
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
            CHECK(v <= prev + kHenkCompensation + 1e-12);
            prev = v;
        }
    }
}

TEST_CASE("queue model consistency checks") {
    QueueModel q{0.5, 1.0, 0.4};  // 0.4 * 1.0 != 0.5
    CHECK_THROWS_AS(q.validate(), std::domain_error);
    QueueModel ok{0.5, 2.0, 0.25};
    CHECK_NOTHROW(ok.validate());
}
