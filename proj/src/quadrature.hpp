#pragma once

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <limits>

namespace malab::detail {

struct Integral {
    double value = 0.0;
    double error = 0.0;
};

// Adaptive 20-point Gauss-Legendre: a panel is accepted when it agrees with
// the sum of its two halves to within its share of the tolerance.
template <class F>
Integral adaptive_gauss(F&& f, double a, double b, double rel_tol, int max_depth)
{
    using GL = boost::math::quadrature::gauss<double, 20>;
    constexpr double eps = std::numeric_limits<double>::epsilon();
    const double whole = GL::integrate(f, a, b);
    const double abs_tol = rel_tol * std::abs(whole);

    auto recurse = [&](auto&& self, double lo, double hi, double est, double tol, int depth) -> Integral {
        const double mid = 0.5 * (lo + hi);
        const double left = GL::integrate(f, lo, mid);
        const double right = GL::integrate(f, mid, hi);
        const double sum = left + right;
        const double diff = std::abs(sum - est);
        if (depth <= 0 || diff <= tol || diff <= 64 * eps * (std::abs(left) + std::abs(right)))
            return {sum, diff};
        const Integral l = self(self, lo, mid, left, 0.5 * tol, depth - 1);
        const Integral r = self(self, mid, hi, right, 0.5 * tol, depth - 1);
        return {l.value + r.value, l.error + r.error};
    };
    return recurse(recurse, a, b, whole, abs_tol, max_depth);
}

}  // namespace malab::detail
