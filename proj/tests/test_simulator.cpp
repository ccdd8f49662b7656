#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "edgedim/simulator.hpp"

using Catch::Approx;
using namespace edgedim;

TEST_CASE("counter generator is deterministic and stream-split") {
    CounterRng a(42, kStreamArrivals), b(42, kStreamArrivals);
    CounterRng c(42, kStreamFading), d(43, kStreamArrivals);
    bool all_eq = true, stream_differs = false, seed_differs = false;
    for (int i = 0; i < 1000; ++i) {
        const auto va = a.next();
        all_eq = all_eq && (va == b.next());
        stream_differs = stream_differs || (va != c.next());
        seed_differs = seed_differs || (va != d.next());
    }
    CHECK(all_eq);
    CHECK(stream_differs);
    CHECK(seed_differs);
}

TEST_CASE("uniform draws live strictly inside the unit interval") {
    CounterRng r(7, 1);
    double mn = 1.0, mx = 0.0, sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = r.uniform();
        mn = std::min(mn, u);
        mx = std::max(mx, u);
        sum += u;
    }
    CHECK(mn > 0.0);
    CHECK(mx < 1.0);
    CHECK(sum / n == Approx(0.5).margin(0.005));
}

TEST_CASE("exponential stream passes a distribution test") {
    // Kolmogorov-Smirnov against Exp(1), 1% level
    const int n = 10000;
    CounterRng r(3, kStreamArrivals);
    std::vector<double> xs(n);
    for (auto& x : xs) x = r.exponential(1.0);
    std::sort(xs.begin(), xs.end());
    double dmax = 0.0;
    for (int i = 0; i < n; ++i) {
        const double cdf = 1.0 - std::exp(-xs[i]);
        dmax = std::max(dmax, std::fabs(cdf - (i + 1.0) / n));
        dmax = std::max(dmax, std::fabs(cdf - static_cast<double>(i) / n));
    }
    CHECK(dmax < 1.628 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("queue simulation reproduces the analytic waiting-time tail") {
    const QueueModel q = QueueModel::from_load_service(0.5, 1.0);
    SimConfig cfg;
    cfg.n_arrivals = 400000;
    cfg.seed = 11;
    const std::vector<double> tp{0.0, 1.0, 2.0};
    const auto ccdf = simulate_queue(q, cfg, tp);
    REQUIRE(ccdf.size() == 3);
    CHECK(ccdf[0].ccdf == Approx(0.5).margin(0.01));
    CHECK(ccdf[1].ccdf == Approx(0.17564).margin(0.01));
    CHECK(ccdf[2].ccdf == Approx(mdone_wait_ccdf(q, 2.0)).margin(0.01));
    // same seed, same report
    const auto again = simulate_queue(q, cfg, tp);
    for (int i = 0; i < 3; ++i) CHECK(ccdf[i].ccdf == again[i].ccdf);
    CHECK_THROWS_AS(simulate_queue(QueueModel::from_load_service(1.2, 1.0), cfg, tp),
                    std::domain_error);
}

TEST_CASE("empirical CCDF is monotone non-increasing") {
    const QueueModel q = QueueModel::from_load_service(0.8, 0.02);
    SimConfig cfg;
    cfg.n_arrivals = 100000;
    std::vector<double> tp;
    for (int i = 0; i <= 10; ++i) tp.push_back(0.02 * i);
    const auto ccdf = simulate_queue(q, cfg, tp);
    for (std::size_t i = 1; i < ccdf.size(); ++i)
        CHECK(ccdf[i].ccdf <= ccdf[i - 1].ccdf);
}

TEST_CASE("uplink sample mean approaches the ergodic value") {
    FrameFormat f;
    f.resolution_px = 424.43;
    ChannelParams p;
    const double B = 2e5, r = 0.5;
    const double det = uplink_time(B, r, f, p);
    SimConfig cfg;
    cfg.n_trials = 3000;
    cfg.seed = 5;
    cfg.coherence_time_s = det / 800.0;  // many blocks per frame
    const auto samples = simulate_uplink(B, r, f, p, cfg);
    REQUIRE(samples.size() == cfg.n_trials);
    double mean = 0.0;
    for (double t : samples) mean += t;
    mean /= samples.size();
    CHECK(mean == Approx(det).epsilon(0.01));
    // Dirac concentration: coefficient of variation small at >= 400 blocks
    double var = 0.0;
    for (double t : samples) var += (t - mean) * (t - mean);
    var /= samples.size();
    CHECK(std::sqrt(var) / mean < 0.05);
}

TEST_CASE("single-block frames average the instantaneous rate, not its inverse") {
    // With the whole frame inside one coherence block, the mean completion
    // time is E[bits/rate], which exceeds bits/E[rate]: the ergodic value
    // is only reached by averaging across many blocks. The gap is only
    // visible at order-one SNR, so the cell edge and a huge bandwidth are
    // used to bring the typical SNR down to ~1.
    FrameFormat f;
    f.resolution_px = 424.43;
    ChannelParams p;
    const double B = 8e12, r = 5.0;
    SimConfig cfg;
    cfg.n_trials = 20000;
    cfg.seed = 9;
    cfg.coherence_time_s = 1e4;  // one block covers any frame
    const auto samples = simulate_uplink(B, r, f, p, cfg);
    double mean = 0.0;
    for (double t : samples) mean += t;
    mean /= samples.size();
    CHECK(mean > uplink_time(B, r, f, p) * 1.05);
}

TEST_CASE("end-to-end simulation validates the dimensioned system") {
    Scenario sc;
    const DimensioningSolution sol = solve(sc);
    REQUIRE(sol.status == SolveStatus::optimal);
    SimConfig cfg;
    cfg.n_arrivals = 30000;
    cfg.seed = 123;
    const SimulationReport rep = simulate_end_to_end(sol, sc, cfg);
    CHECK(rep.success_probability >= sc.omega_min - rep.success_ci_halfwidth);
    CHECK(rep.success_probability <= 1.0);
    CHECK(rep.mean_service_s ==
          Approx(inference_work(sol.resolution_px, sc.detector) / sol.compute_tflops));
    CHECK(rep.seed == cfg.seed);
    for (std::size_t i = 1; i < rep.empirical_ccdf.size(); ++i)
        CHECK(rep.empirical_ccdf[i].ccdf <= rep.empirical_ccdf[i - 1].ccdf);

    // overwhelming resources push the success probability to one
    DimensioningSolution big = sol;
    big.bandwidth_hz *= 100.0;
    big.compute_tflops *= 100.0;
    const SimulationReport rb = simulate_end_to_end(big, sc, cfg);
    CHECK(rb.success_probability >= 1.0 - rb.success_ci_halfwidth - 1e-12);

    // starving the server below the load cap collapses the success rate
    DimensioningSolution starved = sol;
    starved.compute_tflops =
        sc.arrival_rate() * inference_work(sol.resolution_px, sc.detector) / 1.02;
    const SimulationReport rs = simulate_end_to_end(starved, sc, cfg);
    CHECK(rs.success_probability < sc.omega_min);
}

TEST_CASE("simulation configuration validation") {
    SimConfig cfg;
    cfg.n_arrivals = 0;
    CHECK_THROWS_AS(cfg.validate(), std::domain_error);
    cfg = SimConfig{};
    cfg.warmup_fraction = 0.9;
    CHECK_THROWS_AS(cfg.validate(), std::domain_error);
}
