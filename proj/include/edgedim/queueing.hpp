#ifndef EDGEDIM_QUEUEING_HPP
#define EDGEDIM_QUEUEING_HPP

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "edgedim/specfun.hpp"

// M/D/1 waiting-time distributions: the exact Erlang-equilibrium CCDF,
// Henk's single-exponential tail approximation, and the machinery for
// certifying the worst-case gap between the two.

namespace edgedim {

struct QueueModel {
    double load = 0.0;          // rho, Erlang
    double service_time_s = 0.0;
    double arrival_rate = 0.0;  // lambda*A, frames/s

    static QueueModel from_load_service(double rho, double ts) {
        return {rho, ts, rho / ts};
    }

    void validate() const {
        if (!(load > 0.0 && load < 1.0))
            throw std::domain_error("QueueModel: stability requires 0 < rho < 1, got " +
                                    std::to_string(load));
        if (!(service_time_s > 0.0))
            throw std::domain_error("QueueModel: service time must be positive");
        if (std::fabs(arrival_rate * service_time_s - load) > 1e-12 * std::max(1.0, load))
            throw std::domain_error("QueueModel: arrival_rate * service_time must equal load");
    }
};

// tau > 1 satisfying rho tau e^{-rho tau} = rho e^{-rho}; the decay-rate
// root from the negative Lambert branch.
inline double tau(double rho) {
    if (!(rho > 0.0 && rho < 1.0))
        throw std::domain_error("tau: requires rho in (0,1), got " + std::to_string(rho));
    double arg = -rho * std::exp(-rho);
    const double neg_inv_e = -std::exp(-1.0);
    if (arg < neg_inv_e) arg = neg_inv_e;  // fp rounding near rho -> 1
    return -specfun::lambert_w_m1(arg) / rho;
}

// Theorem-1 compensation margin: the certified bound on e*(rho).
inline constexpr double kHenkCompensation = 0.017;

namespace detail {

// Certified upper bound on the exact CCDF where the series is unusable:
// the one-sided approximation gap never exceeds the compensation margin.
inline double mdone_ccdf_upper_bound(double rho, double t) {
    const double tv = tau(rho);
    const double le = std::log1p(-rho) - std::log(rho * tv - 1.0) - rho * (tv - 1.0) * t;
    const double henk = (le < -745.0) ? 0.0 : std::exp(le);
    double v = henk + kHenkCompensation;
    if (v < 1e-12) v = 0.0;
    return std::min(v, 1.0);
}

// Exact M/D/1 CCDF as a function of rho and t = T/T_s. The alternating
// sum cancels catastrophically once its largest term outgrows the
// accumulator precision (t of a few dozen, sooner at high rho); the
// largest term magnitude is tracked and the certified upper bound is
// returned instead when the estimated cancellation error passes 1e-7.
inline double mdone_ccdf_scaled(double rho, double t) {
    if (t > 60.0) return mdone_ccdf_upper_bound(rho, t);
    const int nmax = static_cast<int>(std::floor(t));
    long double sum = 0.0L, comp = 0.0L;  // Kahan accumulation
    long double max_mag = 0.0L;
    for (int nu = 0; nu <= nmax; ++nu) {
        const double x = rho * (nu - t);  // <= 0
        long double term;
        if (x == 0.0) {
            term = (nu == 0) ? 1.0L : 0.0L;
        } else {
            const double mag = nu * std::log(-x) - std::lgamma(nu + 1.0) - x;
            term = std::exp(static_cast<long double>(mag));
            if (nu % 2 == 1) term = -term;
        }
        if (std::fabs(term) > max_mag) max_mag = std::fabs(term);
        const long double y = term - comp;
        const long double s2 = sum + y;
        comp = (s2 - sum) - y;
        sum = s2;
    }
    const double err_est =
        (1.0 - rho) * static_cast<double>(max_mag) * 5e-19 * (nmax + 1);
    if (err_est > 1e-7) return mdone_ccdf_upper_bound(rho, t);
    double v = 1.0 - (1.0 - rho) * static_cast<double>(sum);
    // clamp only sub-1e-12 floating noise
    if (v < 0.0 && v > -1e-12) v = 0.0;
    if (v > 1.0 && v < 1.0 + 1e-12) v = 1.0;
    return v;
}

// Henk CCDF without the rho floor; used internally by the solver where
// loads below 1e-6 arise legitimately (value ~ 0 there).
inline double henk_ccdf_unchecked(double rho, double arrival_rate, double T) {
    const double tv = tau(rho);
    const double log_pref = std::log1p(-rho) - std::log(rho * tv - 1.0);
    const double expo = arrival_rate * (tv - 1.0) * T;
    const double le = log_pref - expo;
    if (le < -745.0) return 0.0;
    return std::exp(le);
}

}  // namespace detail

// Exact CCDF P(T_w > T) of the M/D/1 waiting time.
inline double mdone_wait_ccdf(const QueueModel& q, double T) {
    q.validate();
    if (!(T >= 0.0)) throw std::domain_error("mdone_wait_ccdf: requires T >= 0");
    return detail::mdone_ccdf_scaled(q.load, T / q.service_time_s);
}

inline constexpr double kHenkRhoFloor = 1e-6;

// Henk's approximation (1-rho)/(rho tau - 1) e^{-lambda_A (tau-1) T}.
inline double henk_wait_ccdf(const QueueModel& q, double T) {
    q.validate();
    if (!(T >= 0.0)) throw std::domain_error("henk_wait_ccdf: requires T >= 0");
    if (q.load < kHenkRhoFloor)
        throw std::domain_error("henk_wait_ccdf: rho below numeric floor " +
                                std::to_string(kHenkRhoFloor));
    return detail::henk_ccdf_unchecked(q.load, q.arrival_rate, T);
}

// Argument maximizing (exact - Henk): T = -(T_s/(rho tau)) ln((rho tau - 1)/(tau - 1)).
inline double max_error_argument(const QueueModel& q) {
    q.validate();
    const double tv = tau(q.load);
    const double u = q.load * tv;
    return -(q.service_time_s / u) * std::log((u - 1.0) / (tv - 1.0));
}

struct ErrorBoundPoint {
    double rho = 0.0;
    double t_max_error_s = 0.0;   // at service time 1 s
    double error_at_argmax = 0.0;
    double error_dense_scan = 0.0;
    double max_error() const { return std::max(error_at_argmax, error_dense_scan); }
};

// Worst-case one-sided gap e*(rho) = max_T (exact - Henk), evaluated at
// the closed-form argmax and confirmed by a dense scan. Independent of
// the service time, so evaluated at T_s = 1.
inline std::vector<ErrorBoundPoint> certify_error_bound(std::span<const double> rho_grid) {
    std::vector<ErrorBoundPoint> out;
    out.reserve(rho_grid.size());
    for (double rho : rho_grid) {
        const QueueModel q = QueueModel::from_load_service(rho, 1.0);
        ErrorBoundPoint p;
        p.rho = rho;
        p.t_max_error_s = max_error_argument(q);
        p.error_at_argmax = mdone_wait_ccdf(q, p.t_max_error_s) -
                            detail::henk_ccdf_unchecked(rho, q.arrival_rate, p.t_max_error_s);
        double best = 0.0;
        const double dt = 1e-3;
        for (double T = 0.0; T <= 20.0; T += dt) {
            const double e = detail::mdone_ccdf_scaled(rho, T) -
                             detail::henk_ccdf_unchecked(rho, q.arrival_rate, T);
            if (e > best) best = e;
        }
        p.error_dense_scan = best;
        out.push_back(p);
    }
    return out;
}

}  // namespace edgedim

#endif
