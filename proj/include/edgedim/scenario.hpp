#ifndef EDGEDIM_SCENARIO_HPP
#define EDGEDIM_SCENARIO_HPP

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "edgedim/channel.hpp"
#include "edgedim/detector.hpp"
#include "edgedim/queueing.hpp"

namespace edgedim {

// Full problem instance for the single-cell dimensioning program.
struct Scenario {
    double radius_km = 0.5;         // r
    double traffic_density = 10.0;  // lambda, frames/s/km^2
    ChannelParams channel;
    FrameFormat frame;              // resolution free; theta and xi fixed
    DetectorCoefficients detector;
    double deadline_s = 0.5;        // D
    double omega_min = 0.8;
    double a_min = 0.9;
    double rho_max = 0.99;
    double beta1 = 0.5;
    double beta2 = 1e6;

    double cell_area_km2() const { return std::numbers::pi * radius_km * radius_km; }
    double arrival_rate() const { return traffic_density * cell_area_km2(); }  // lambda*A

    void validate() const {
        channel.validate();
        frame.validate();
        detector.validate();
        if (!(radius_km > 0.0)) throw std::domain_error("Scenario: radius must be positive");
        if (!(traffic_density > 0.0)) throw std::domain_error("Scenario: traffic density must be positive");
        if (!(deadline_s > 0.0)) throw std::domain_error("Scenario: deadline must be positive");
        if (!(omega_min > 0.0 && omega_min < 1.0 - kHenkCompensation))
            throw std::domain_error("Scenario: omega_min must leave headroom for the "
                                    "approximation-error compensation (< 0.983)");
        if (!(rho_max > 0.0 && rho_max < 1.0))
            throw std::domain_error("Scenario: rho_max must be in (0,1)");
        if (!(beta1 > 0.0 && beta1 < 1.0)) throw std::domain_error("Scenario: beta1 must be in (0,1)");
        if (!(beta2 > 0.0)) throw std::domain_error("Scenario: beta2 must be positive");
    }
};

// Scenario-derived constants collapsing channel, traffic, and accuracy
// parameters. kappa2 comes in two variants from the epigraph split of
// the peak-power min operator; the binding one is the larger.
struct Kappas {
    double kappa1 = 0.0;       // (theta/xi) ln 2
    double kappa2_low = 0.0;   // l = P r^{alpha eps}
    double kappa2_peak = 0.0;  // l = P-bar
    double kappa3 = 0.0;       // lambda pi r^2 / rho_max
    double kappa4 = 0.0;       // minimum resolution, px
    bool kappa4_clamped = false;

    double kappa2_binding() const { return std::max(kappa2_low, kappa2_peak); }
    bool peak_power_binding() const { return kappa2_peak > kappa2_low; }

    // Theorem-2 aggregates.
    double omega1(double deadline_s) const {
        return kappa2_binding() * kappa1 * kappa4 * kappa4 / deadline_s;
    }
    double omega2(const DetectorCoefficients& c) const {
        return c.c1 * kappa4 * kappa4 * kappa4 + c.c2;
    }
};

inline Kappas compute_kappas(const Scenario& sc) {
    sc.validate();
    Kappas k;
    k.kappa1 = sc.frame.bits_per_pixel / sc.frame.compression * std::numbers::ln2;
    k.kappa2_low = kappa2_low(sc.radius_km, sc.channel);
    k.kappa2_peak = kappa2_peak(sc.radius_km, sc.channel);
    k.kappa3 = sc.arrival_rate() / sc.rho_max;
    const MinResolution mr = min_resolution(sc.a_min, sc.detector);
    k.kappa4 = mr.pixels;
    k.kappa4_clamped = mr.clamped_to_zero;
    return k;
}

// Weighted per-frame cost J = beta1 B + (1 - beta1) beta2 H / (lambda pi r^2).
inline double objective(double bandwidth_hz, double compute_tflops, const Scenario& sc) {
    return sc.beta1 * bandwidth_hz +
           (1.0 - sc.beta1) * sc.beta2 * compute_tflops / sc.arrival_rate();
}

}  // namespace edgedim

#endif
