#ifndef EDGEDIM_SIMULATOR_HPP
#define EDGEDIM_SIMULATOR_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "edgedim/dimensioning.hpp"
#include "edgedim/scenario.hpp"

// Monte Carlo and discrete-event validation of the analytic models:
// fading-level uplink transmission, Lindley-recursion M/D/1 queueing,
// and end-to-end success-probability estimation.

namespace edgedim {

// Counter-based splitmix64 generator. The output for draw i of stream s
// depends only on (seed, s, i), so replications are reproducible and
// streams are independent under parallel execution.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : key_(mix(seed ^ mix(stream + 0x1F123BB5159A55E5ull))) {}

    std::uint64_t next() { return mix(key_ + kGolden * ++counter_); }

    // uniform on the open interval (0,1)
    double uniform() {
        return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
    }

    double exponential(double mean) { return -mean * std::log(uniform()); }

private:
    static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;
    static std::uint64_t mix(std::uint64_t z) {
        z += kGolden;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

// Stream ids for the per-component RNG split.
enum : std::uint64_t { kStreamArrivals = 1, kStreamFading = 2 };

struct SimConfig {
    std::uint64_t n_arrivals = 1'000'000;
    std::uint64_t n_trials = 10'000;
    std::uint64_t seed = 1;
    double coherence_time_s = 1e-4;
    double warmup_fraction = 0.1;
    bool sampled_uplink = false;  // end-to-end: sample fading instead of the Dirac value

    void validate() const {
        if (n_arrivals < 1 || n_trials < 1)
            throw std::domain_error("SimConfig: counts must be >= 1");
        if (!(warmup_fraction >= 0.0 && warmup_fraction <= 0.5))
            throw std::domain_error("SimConfig: warmup_fraction must be in [0, 0.5]");
    }
};

struct CcdfSample {
    double t_seconds = 0.0;
    double ccdf = 0.0;
    double ci_halfwidth = 0.0;  // 95%, normal approximation
};

struct SimulationReport {
    std::vector<CcdfSample> empirical_ccdf;
    double success_probability = 0.0;
    double success_ci_halfwidth = 0.0;
    double mean_uplink_s = 0.0;
    double mean_wait_s = 0.0;
    double mean_service_s = 0.0;
    std::uint64_t n_samples = 0;
    std::uint64_t seed = 0;
};

inline double ci_halfwidth_95(double p, std::uint64_t n) {
    return 1.959963984540054 * std::sqrt(std::max(p * (1.0 - p), 0.0) / n);
}

// Per-trial uplink completion times: the frame's bits are sent across
// successive coherence blocks, each carrying Tc * B * log2(1 + SNR_i)
// bits under i.i.d. exponential fading.
inline std::vector<double> simulate_uplink(double bandwidth_hz, double r_km,
                                           const FrameFormat& frame,
                                           const ChannelParams& params,
                                           const SimConfig& cfg) {
    cfg.validate();
    frame.validate();
    params.validate();
    const double bits = frame.bits();
    const double power = effective_tx_power(r_km, params);
    const double r_alpha = std::pow(r_km / kPathlossDistanceUnitKm, params.path_loss_exponent);
    const double snr_scale = power / (r_alpha * params.noise_psd_mw_hz * bandwidth_hz);
    const double gain = params.antenna_gain();

    CounterRng rng(cfg.seed, kStreamFading);
    std::vector<double> times;
    times.reserve(cfg.n_trials);
    for (std::uint64_t trial = 0; trial < cfg.n_trials; ++trial) {
        double remaining = bits;
        double t = 0.0;
        while (true) {
            const double g = rng.exponential(gain);
            const double rate = bandwidth_hz * std::log2(1.0 + g * snr_scale);
            const double block_bits = rate * cfg.coherence_time_s;
            if (block_bits >= remaining) {
                t += (rate > 0.0) ? remaining / rate : cfg.coherence_time_s;
                break;
            }
            remaining -= block_bits;
            t += cfg.coherence_time_s;
        }
        times.push_back(t);
    }
    return times;
}

// FCFS M/D/1 waiting times via the Lindley recursion, with the first
// warmup_fraction of arrivals discarded before statistics.
inline std::vector<double> simulate_queue_waits(const QueueModel& q, const SimConfig& cfg) {
    q.validate();
    cfg.validate();
    CounterRng rng(cfg.seed, kStreamArrivals);
    const std::uint64_t warmup =
        static_cast<std::uint64_t>(cfg.warmup_fraction * cfg.n_arrivals);
    std::vector<double> waits;
    waits.reserve(cfg.n_arrivals - warmup);
    double w = 0.0;
    for (std::uint64_t i = 0; i < cfg.n_arrivals; ++i) {
        if (i >= warmup) waits.push_back(w);
        const double gap = rng.exponential(1.0 / q.arrival_rate);
        w = std::max(0.0, w + q.service_time_s - gap);
    }
    return waits;
}

inline std::vector<CcdfSample> empirical_ccdf(std::span<const double> samples,
                                              std::span<const double> t_points) {
    std::vector<CcdfSample> out;
    out.reserve(t_points.size());
    for (double t : t_points) {
        std::uint64_t count = 0;
        for (double v : samples)
            if (v > t) ++count;
        const double p = static_cast<double>(count) / samples.size();
        out.push_back({t, p, ci_halfwidth_95(p, samples.size())});
    }
    return out;
}

inline std::vector<CcdfSample> simulate_queue(const QueueModel& q, const SimConfig& cfg,
                                              std::span<const double> t_points) {
    const std::vector<double> waits = simulate_queue_waits(q, cfg);
    return empirical_ccdf(waits, t_points);
}

// End-to-end validation of a dimensioning solution: the tagged user sits
// at the cell edge (worst case), frames arrive as a Poisson process at
// rate lambda pi r^2, and each frame experiences T_ul + T_w + T_s.
inline SimulationReport simulate_end_to_end(const DimensioningSolution& sol,
                                            const Scenario& sc, const SimConfig& cfg) {
    cfg.validate();
    sc.validate();
    if (sol.status != SolveStatus::optimal && sol.status != SolveStatus::stall)
        throw std::invalid_argument("simulate_end_to_end: requires a solved scenario");

    const double lamA = sc.arrival_rate();
    const double ts = inference_work(sol.resolution_px, sc.detector) / sol.compute_tflops;
    FrameFormat frame = sc.frame;
    frame.resolution_px = sol.resolution_px;
    const double tul_det = uplink_time(sol.bandwidth_hz, sc.radius_km, frame, sc.channel);

    std::vector<double> tuls;
    if (cfg.sampled_uplink) {
        SimConfig up = cfg;
        up.n_trials = cfg.n_arrivals;
        tuls = simulate_uplink(sol.bandwidth_hz, sc.radius_km, frame, sc.channel, up);
    }

    CounterRng arr(cfg.seed, kStreamArrivals);
    const std::uint64_t warmup =
        static_cast<std::uint64_t>(cfg.warmup_fraction * cfg.n_arrivals);
    std::vector<double> totals;
    totals.reserve(cfg.n_arrivals - warmup);
    double sum_tul = 0.0, sum_wait = 0.0;
    double w = 0.0;
    for (std::uint64_t i = 0; i < cfg.n_arrivals; ++i) {
        const double tul = cfg.sampled_uplink ? tuls[i] : tul_det;
        if (i >= warmup) {
            totals.push_back(tul + w + ts);
            sum_tul += tul;
            sum_wait += w;
        }
        const double gap = arr.exponential(1.0 / lamA);
        w = std::max(0.0, w + ts - gap);
    }

    SimulationReport rep;
    rep.n_samples = totals.size();
    rep.seed = cfg.seed;
    rep.mean_service_s = ts;
    rep.mean_uplink_s = sum_tul / totals.size();
    rep.mean_wait_s = sum_wait / totals.size();
    std::uint64_t ok = 0;
    for (double v : totals)
        if (v <= sc.deadline_s) ++ok;
    rep.success_probability = static_cast<double>(ok) / totals.size();
    rep.success_ci_halfwidth = ci_halfwidth_95(rep.success_probability, totals.size());

    std::vector<double> t_points;
    for (int i = 0; i <= 20; ++i) t_points.push_back(sc.deadline_s * 1.5 * i / 20.0);
    rep.empirical_ccdf = empirical_ccdf(totals, t_points);
    return rep;
}

}  // namespace edgedim

#endif
