#pragma once

#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "blowup/error.hpp"

namespace blowup {

/// Adaptive 15-point Gauss-Kronrod on [a, b] to relative tolerance `rel_tol`,
/// at most 2^15 subintervals.
template <class F>
double integrate(F&& f, double a, double b, double rel_tol = 1e-10) {
    if (a == b) return 0.0;
    double err = 0.0;
    double l1 = 0.0;
    const double value =
        boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 15, rel_tol, &err, &l1);
    if (!std::isfinite(value)) throw DomainError("quadrature produced a non-finite value");
    return value;
}

}  // namespace blowup
