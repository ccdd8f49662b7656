#ifndef EDGEDIM_DETECTOR_HPP
#define EDGEDIM_DETECTOR_HPP

#include <cmath>
#include <stdexcept>
#include <string>

// Parametric single-shot detector models: inference time (c1 s^3 + c2)/H
// with the numerator in TFLOP, and accuracy c3 - c4 e^{-c5 s} in mAP.
// The resolution s is treated as a continuous positive real.

namespace edgedim {

struct DetectorCoefficients {
    double c1 = 7e-10;   // TFLOP per pixel^3
    double c2 = 0.083;   // TFLOP
    double c3 = 1.0;     // accuracy asymptote
    double c4 = 1.578;
    double c5 = 6.5e-3;  // 1/pixel

    void validate() const {
        if (!(c1 > 0.0 && c2 > 0.0 && c3 > 0.0 && c4 > 0.0 && c5 > 0.0))
            throw std::domain_error("DetectorCoefficients: all coefficients must be positive");
        if (!(c3 <= 1.0))
            throw std::domain_error("DetectorCoefficients: c3 must not exceed 1");
    }
};

// Per-frame work in TFLOP at resolution s.
inline double inference_work(double s_px, const DetectorCoefficients& c) {
    return c.c1 * s_px * s_px * s_px + c.c2;
}

inline double service_time(double s_px, double compute_tflops, const DetectorCoefficients& c) {
    if (!(s_px >= 0.0))
        throw std::domain_error("service_time: requires s >= 0");
    if (!(compute_tflops > 0.0))
        throw std::domain_error("service_time: requires H > 0, got " + std::to_string(compute_tflops));
    return inference_work(s_px, c) / compute_tflops;
}

// mAP estimate; intentionally not clamped to [0,1], consumers enforce
// s >= kappa4 instead.
inline double accuracy(double s_px, const DetectorCoefficients& c) {
    if (!(s_px >= 0.0))
        throw std::domain_error("accuracy: requires s >= 0");
    return c.c3 - c.c4 * std::exp(-c.c5 * s_px);
}

struct MinResolution {
    double pixels = 0.0;
    bool clamped_to_zero = false;  // a_min at or below the s=0 accuracy
};

// kappa4 = (1/c5) ln(c4 / (c3 - a_min)): the unique s with accuracy(s) = a_min.
inline MinResolution min_resolution(double a_min, const DetectorCoefficients& c) {
    if (!(a_min < c.c3))
        throw std::domain_error("min_resolution: accuracy target " + std::to_string(a_min) +
                                " is unreachable (a_min >= c3)");
    if (a_min <= c.c3 - c.c4) return {0.0, true};
    return {std::log(c.c4 / (c.c3 - a_min)) / c.c5, false};
}

}  // namespace edgedim

#endif
