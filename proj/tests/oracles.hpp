#pragma once

// Independent reference computations for the tests. Nothing here calls the library.

#include <cmath>
#include <functional>

namespace oracle {

// Square roots to 20 significant digits.
inline constexpr long double kSqrt2 = 1.4142135623730950488L;
inline constexpr long double kSqrt5 = 2.2360679774997896964L;
inline constexpr long double kSqrt17 = 4.1231056256176605498L;
inline constexpr long double kSqrt112 = 10.583005244258362742L;

// Positive root of (d-1)p^2 - (d+1)p - 2 by bisection; the quadratic is negative
// at p = 1 and positive at p = 2(d+1)/(d-1) + 1.
inline double strauss_bisect(double d) {
    auto f = [d](long double p) { return (d - 1) * p * p - (d + 1) * p - 2; };
    long double lo = 1.0L;
    long double hi = 2.0L * (d + 1) / (d - 1) + 1.0L;
    for (int i = 0; i < 200; ++i) {
        const long double mid = 0.5L * (lo + hi);
        (f(mid) > 0 ? hi : lo) = mid;
    }
    return static_cast<double>(0.5L * (lo + hi));
}

struct Chain {
    long double a;
    long double b;
    long double logC;
};

// One step of the lower-bound recursion, written out in long double.
inline Chain chain_step(const Chain& s, int m, double mu, double p) {
    const long double P = p;
    return {P * (s.a - mu / 2.0L) + 2.0L + mu / 2.0L, P * s.b + m * (P - 1.0L),
            P * s.logC - (P + 1.0L) * std::log(2.0L) - 2.0L * std::log(P * s.a + 2.0L)};
}

// Composite Simpson rule with `panels` (even) subintervals.
inline double simpson(const std::function<double(double)>& f, double a, double b, int panels = 4000) {
    const double h = (b - a) / panels;
    double s = f(a) + f(b);
    for (int i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

inline double rel_err(double x, double ref) { return std::abs(x - ref) / std::abs(ref); }

}  // namespace oracle
