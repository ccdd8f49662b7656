#ifndef EDGEDIM_SPECFUN_HPP
#define EDGEDIM_SPECFUN_HPP

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

// Scalar special functions needed by the capacity formula and the M/D/1
// tail approximation: the exponential integral E1 and the negative branch
// of the Lambert W function. All functions are pure and reentrant.

namespace edgedim::specfun {

inline constexpr double kEulerGamma = 0.57721566490153286060651209;

namespace detail {

// e^x * E1(x) for x >= 1 via the continued fraction
//   E1(x) = e^{-x} / (x + 1 - 1^2/(x + 3 - 2^2/(x + 5 - ...)))
// evaluated with the modified Lentz algorithm. Returning the fused
// product keeps the result finite for x > 700.
inline double expx_e1_contfrac(double x) {
    const double tiny = 1e-300;
    double b = x + 1.0;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int n = 1; n <= 300; ++n) {
        const double a = -static_cast<double>(n) * n;
        b += 2.0;
        d = b + a * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + a / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = c * d;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) break;
    }
    return h;
}

// E1(x) for 0 < x <= 1 via the ascending series
//   E1(x) = -gamma - ln x + sum_{k>=1} (-1)^{k+1} x^k / (k k!)
inline double e1_series(double x) {
    double sum = 0.0;
    double pow_term = 1.0;  // (-x)^k / k!
    for (int k = 1; k <= 60; ++k) {
        pow_term *= -x / k;
        const double term = -pow_term / k;
        sum += term;
        if (std::fabs(term) < 1e-18 * std::fabs(sum) + 1e-300) break;
    }
    return -kEulerGamma - std::log(x) + sum;
}

}  // namespace detail

// E1(x) = int_x^inf e^{-t}/t dt, x > 0. Series below the switchover at
// x = 1, continued fraction above it; both converge in a bounded number
// of terms there.
inline double exp_integral_e1(double x) {
    if (!(x > 0.0))
        throw std::domain_error("exp_integral_e1: requires x > 0, got " + std::to_string(x));
    if (x <= 1.0) return detail::e1_series(x);
    if (x > 700.0) return detail::expx_e1_contfrac(x) * std::exp(-x);  // underflows gracefully
    return detail::expx_e1_contfrac(x) * std::exp(-x);
}

// Fused e^x * E1(x); overflow-safe for arbitrarily large x.
inline double expx_e1(double x) {
    if (!(x > 0.0))
        throw std::domain_error("expx_e1: requires x > 0, got " + std::to_string(x));
    if (x <= 1.0) return std::exp(x) * detail::e1_series(x);
    return detail::expx_e1_contfrac(x);
}

// Negative branch W_{-1}(x) on [-1/e, 0): the w <= -1 solution of
// w e^w = x. Seeded from the branch-point expansion (x near -1/e) or the
// double-log asymptotic (x near 0), refined with Halley iterations to a
// relative residual of 1e-13.
inline double lambert_w_m1(double x) {
    const double neg_inv_e = -std::exp(-1.0);
    if (!(x >= neg_inv_e && x < 0.0))
        throw std::domain_error("lambert_w_m1: requires x in [-1/e, 0), got " + std::to_string(x));
    // Within 1e-12 of the branch point the derivative blows up; snap to -1.
    if (x - neg_inv_e < 1e-12) return -1.0;

    double w;
    if (x < -0.25) {
        // Corless et al. expansion about the branch point, p <= 0 branch.
        const double p = -std::sqrt(2.0 * (1.0 + std::exp(1.0) * x));
        w = -1.0 + p - p * p / 3.0 + 11.0 * p * p * p / 72.0;
    } else {
        const double l1 = std::log(-x);
        const double l2 = std::log(-l1);
        w = l1 - l2 + l2 / l1;
    }

    const double tol = 0.5e-13 * std::fabs(x);
    for (int it = 0; it < 20; ++it) {
        const double ew = std::exp(w);
        const double f = w * ew - x;
        if (std::fabs(f) <= tol) break;
        const double fp = ew * (w + 1.0);
        const double denom = fp - (w + 2.0) * f / (2.0 * (w + 1.0));
        w -= f / denom;
    }
    if (w > -1.0) w = -1.0;
    return w;
}

}  // namespace edgedim::specfun

#endif
