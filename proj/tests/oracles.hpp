#ifndef EDGEDIM_TEST_ORACLES_HPP
#define EDGEDIM_TEST_ORACLES_HPP

#include <cmath>
#include <functional>
#include <stdexcept>

// Independent reference implementations for the special functions, built
// from quadrature and bisection only. Deliberately slow and simple so
// they share no code path with the library under test.

namespace oracles {

inline double simpson(const std::function<double(double)>& f, double a, double b) {
    const double m = 0.5 * (a + b);
    return (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b));
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double left = simpson(f, a, m);
    const double right = simpson(f, m, b);
    if (depth <= 0 || std::fabs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, right, 0.5 * tol, depth - 1);
}

// E1(x) by quadrature of the defining integral, mapped to [0,1) via
// t = x + u/(1-u).
inline double e1_quadrature(double x) {
    if (!(x > 0.0)) throw std::domain_error("e1_quadrature: x must be positive");
    auto g = [x](double u) {
        if (u >= 1.0) return 0.0;
        const double t = x + u / (1.0 - u);
        const double jac = 1.0 / ((1.0 - u) * (1.0 - u));
        return std::exp(-t) / t * jac;
    };
    const double upper = 1.0 - 1e-9;
    const double whole = simpson(g, 0.0, upper);
    const double tol = 1e-15 * std::fabs(whole) + 1e-300;  // relative target
    return adaptive_simpson(g, 0.0, upper, whole, tol, 60);
}

// W_{-1}(x) by bisection of w e^w = x over w in [-750, -1]; w e^w is
// strictly decreasing there, from -1/e down toward 0-.
inline double wm1_bisection(double x) {
    const double neg_inv_e = -std::exp(-1.0);
    if (!(x >= neg_inv_e && x < 0.0))
        throw std::domain_error("wm1_bisection: x outside [-1/e, 0)");
    double lo = -750.0, hi = -1.0;  // f(lo) ~ 0- > f(hi) = -1/e; f increases toward 0 as w decreases
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = mid * std::exp(mid);
        if (fm > x) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

// tau(rho) by bisection of y e^{-y} = rho e^{-rho} for y > 1 (strictly
// decreasing branch), then tau = y / rho.
inline double tau_bisection(double rho) {
    if (!(rho > 0.0 && rho < 1.0)) throw std::domain_error("tau_bisection: rho in (0,1)");
    const double target = rho * std::exp(-rho);
    double lo = 1.0, hi = 1.0;
    while (hi * std::exp(-hi) > target) hi *= 2.0;  // bracket
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid * std::exp(-mid) > target) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi) / rho;
}

}  // namespace oracles

#endif
