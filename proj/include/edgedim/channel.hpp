#ifndef EDGEDIM_CHANNEL_HPP
#define EDGEDIM_CHANNEL_HPP

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "edgedim/specfun.hpp"

// Uplink channel model: fractional power control with a peak clamp,
// ergodic capacity under Rayleigh fading, and the deterministic
// uplink-time limit for frames spanning many coherence blocks.
//
// Unit convention (Table-1 reading): bandwidth in Hz, powers in mW, noise
// PSD in mW/Hz, distances in km with the reference power defined at 1 km.
// The antenna constant gamma = lambda_c^2/(16 pi^2) is computed from the
// carrier wavelength in meters. The path-loss distance unit is exposed as
// a single constant so the convention can be changed in one place.

namespace edgedim {

inline constexpr double kSpeedOfLightMps = 299792458.0;

// Distance unit (km) used in the r^alpha path-loss terms.
inline constexpr double kPathlossDistanceUnitKm = 1.0;

struct ChannelParams {
    double path_loss_exponent = 4.0;        // alpha
    double power_control = 0.5;             // epsilon in [0,1]
    double ref_power_mw = 10.0;             // P at 1 km
    double peak_power_mw = 200.0;           // P-bar
    double noise_psd_mw_hz = 3.9810717055349565e-18;  // N0, -174 dBm/Hz
    double carrier_hz = 2.4e9;

    // gamma = lambda_c^2 / (16 pi^2), recomputed from the carrier so it
    // can never be stored inconsistently.
    double antenna_gain() const {
        const double lambda_c = kSpeedOfLightMps / carrier_hz;
        return lambda_c * lambda_c / (16.0 * std::numbers::pi * std::numbers::pi);
    }

    void validate() const {
        if (!(power_control >= 0.0 && power_control <= 1.0))
            throw std::domain_error("ChannelParams: power_control must be in [0,1]");
        if (!(ref_power_mw > 0.0) || !(peak_power_mw > 0.0))
            throw std::domain_error("ChannelParams: powers must be positive");
        if (!(noise_psd_mw_hz > 0.0))
            throw std::domain_error("ChannelParams: noise PSD must be positive");
        if (!(path_loss_exponent > 2.0))
            throw std::domain_error("ChannelParams: path-loss exponent must exceed 2");
        if (!(carrier_hz > 0.0))
            throw std::domain_error("ChannelParams: carrier frequency must be positive");
    }
};

struct FrameFormat {
    double resolution_px = 0.0;   // side length s; 0 = free (set by the optimizer)
    double bits_per_pixel = 24.0; // theta
    double compression = 2.0;     // xi >= 1

    double bits() const { return bits_at(resolution_px); }
    double bits_at(double s) const { return bits_per_pixel * s * s / compression; }

    void validate() const {
        if (!(bits_per_pixel > 0.0) || !(compression >= 1.0))
            throw std::domain_error("FrameFormat: requires theta > 0 and xi >= 1");
    }
};

// l(r, alpha, eps) = min(P r^{alpha eps}, P-bar), mW.
inline double effective_tx_power(double r_km, const ChannelParams& p) {
    if (!(r_km > 0.0))
        throw std::domain_error("effective_tx_power: requires r > 0, got " + std::to_string(r_km));
    const double scaled = std::pow(r_km / kPathlossDistanceUnitKm,
                                   p.path_loss_exponent * p.power_control);
    return std::min(p.ref_power_mw * scaled, p.peak_power_mw);
}

// kappa2 = N0 r^alpha / (gamma * l) for a given transmit power l.
inline double kappa2_for_power(double r_km, double power_mw, const ChannelParams& p) {
    const double r_alpha = std::pow(r_km / kPathlossDistanceUnitKm, p.path_loss_exponent);
    return p.noise_psd_mw_hz * r_alpha / (p.antenna_gain() * power_mw);
}

inline double kappa2_low(double r_km, const ChannelParams& p) {
    const double scaled = std::pow(r_km / kPathlossDistanceUnitKm,
                                   p.path_loss_exponent * p.power_control);
    return kappa2_for_power(r_km, p.ref_power_mw * scaled, p);
}

inline double kappa2_peak(double r_km, const ChannelParams& p) {
    return kappa2_for_power(r_km, p.peak_power_mw, p);
}

// phi(B, kappa2) = B e^{B kappa2} E1(B kappa2). Strictly increasing and
// concave in B, with asymptote 1/kappa2 as B -> inf.
inline double phi(double bandwidth_hz, double kappa2) {
    if (!(bandwidth_hz > 0.0) || !(kappa2 > 0.0))
        throw std::domain_error("phi: requires B > 0 and kappa2 > 0");
    return bandwidth_hz * specfun::expx_e1(bandwidth_hz * kappa2);
}

inline double phi_low(double bandwidth_hz, double r_km, const ChannelParams& p) {
    return phi(bandwidth_hz, kappa2_low(r_km, p));
}

inline double phi_peak(double bandwidth_hz, double r_km, const ChannelParams& p) {
    return phi(bandwidth_hz, kappa2_peak(r_km, p));
}

// d phi / dB = (1 + x) e^x E1(x) - 1 with x = B kappa2. The direct
// expression loses x^2 * eps to cancellation, so it is swapped for the
// asymptotic series once that passes ~1e-8 relative (x = 1e4, where the
// series truncation error is ~1e-10).
inline double phi_derivative(double bandwidth_hz, double kappa2) {
    const double x = bandwidth_hz * kappa2;
    if (x > 1e4) {
        const double ix = 1.0 / x;
        return ix * ix * (1.0 - 4.0 * ix + 18.0 * ix * ix);
    }
    return (1.0 + x) * specfun::expx_e1(x) - 1.0;
}

// Ergodic capacity R-bar = phi(B, kappa2(r)) / ln 2, bit/s, with the
// peak-power clamp applied through the effective transmit power.
inline double ergodic_rate(double bandwidth_hz, double r_km, const ChannelParams& p) {
    const double k2 = kappa2_for_power(r_km, effective_tx_power(r_km, p), p);
    return phi(bandwidth_hz, k2) / std::numbers::ln2;
}

// Deterministic uplink time: frame bits divided by the ergodic rate.
inline double uplink_time(double bandwidth_hz, double r_km, const FrameFormat& f,
                          const ChannelParams& p) {
    f.validate();
    return f.bits() / ergodic_rate(bandwidth_hz, r_km, p);
}

}  // namespace edgedim

#endif
