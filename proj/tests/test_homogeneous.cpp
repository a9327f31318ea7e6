#include "doctest.h"

#include "malab/errors.hpp"
#include "malab/homogeneous.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <numbers>

using namespace malab;
using std::numbers::pi;

namespace {

// Independent evaluation of I_c: tanh-sinh handles the endpoint square-root
// singularities directly, on roots found by a separate bracketing.
double reference_period(double c, const Regime& r)
{
    auto h = [&](double t) { return envelope_value(t, c, r); };
    auto root = [&](double a, double b) {
        for (int i = 0; i < 200; ++i) {
            const double m = 0.5 * (a + b);
            ((h(a) < 0) == (h(m) < 0) ? a : b) = m;
        }
        return 0.5 * (a + b);
    };
    double lo = r.c_alpha, hi = r.c_alpha;
    while (h(lo) > 0)
        lo *= 0.5;
    while (h(hi) > 0)
        hi *= 2;
    const double tm = root(lo, r.c_alpha), tp = root(r.c_alpha, hi);
    boost::math::quadrature::tanh_sinh<double> ts;
    // Nodes pushed against an endpoint can see h <= 0 from rounding; their
    // weight is negligible.
    return ts.integrate([&](double t) {
        const double v = h(t);
        return v > 0 ? 1 / std::sqrt(2 * v) : 0.0;
    }, tm, tp);
}

}  // namespace

TEST_SUITE("homogeneous") {

TEST_CASE("envelope at alpha = 0 is the quadratic c t - 4t^2 - 1 over 2")
{
    const Regime r = regime_from_alpha(0.0);
    for (double t : {0.1, 0.5, 0.9})
        CHECK(envelope_value(t, 5.0, r) == doctest::Approx((5 * t - 4 * t * t - 1) / 2).epsilon(1e-14));
    CHECK(std::abs(envelope_value(0.5, 4.0, r)) < 1e-15);
    CHECK_THROWS_AS(envelope_value(0.0, 5.0, r), DomainError);
}

TEST_CASE("tangency at the radial value")
{
    for (double a : {-1.5, -1.0, 0.0, 2.0, 6.0}) {
        const Regime r = regime_from_alpha(a);
        const Tangency tg = tangency_c0(r);
        CHECK(tg.t0 == doctest::Approx(r.c_alpha).epsilon(1e-12));
        CHECK(std::abs(envelope_value(tg.t0, tg.c0, r)) < 1e-12);
        CHECK(std::abs(envelope_derivative(tg.t0, tg.c0, r)) < 1e-10);
        // both tangency equations
        const double b = r.beta;
        CHECK(tg.c0 * (1 - 1 / b) * std::pow(tg.t0, -2 / b) == doctest::Approx(b * b).epsilon(1e-12));
        // below c0 the window is empty
        for (int i = 0; i < 60; ++i) {
            const double t = std::pow(10.0, -3 + 5.0 * i / 59);
            CHECK(envelope_value(t, 0.99 * tg.c0, r) < 0.0);
        }
    }
    const Tangency t0 = tangency_c0(regime_from_alpha(0.0));
    CHECK(t0.c0 == doctest::Approx(4.0));
    CHECK(t0.t0 == doctest::Approx(0.5));
}

TEST_CASE("envelope window")
{
    const Regime r = regime_from_alpha(2.0);
    const double c = 2 * tangency_c0(r).c0;
    const ProfileEnvelope e = make_envelope(c, r);
    CHECK(e.t_minus < r.c_alpha);
    CHECK(e.t_plus > r.c_alpha);
    CHECK(std::abs(envelope_value(e.t_minus, c, r)) < 1e-12);
    CHECK(std::abs(envelope_value(e.t_plus, c, r)) < 1e-12);
    CHECK_THROWS_AS(make_envelope(tangency_c0(r).c0, r), DomainError);
}

TEST_CASE("period integral against an independent quadrature")
{
    for (double a : {-1.5, -0.5, 1.0, 2.0, 6.0}) {
        const Regime r = regime_from_alpha(a);
        const double c0 = tangency_c0(r).c0;
        for (double f : {1.01, 1.5, 10.0, 1000.0})
            CHECK(period_integral(f * c0, r) == doctest::Approx(reference_period(f * c0, r)).epsilon(1e-7));
    }
    CHECK_THROWS_AS(period_integral(3.9, regime_from_alpha(0.0)), DomainError);
}

TEST_CASE("period integral is continuous along a scan")
{
    const Regime r = regime_from_alpha(4.0);
    const double c0 = tangency_c0(r).c0;
    double prev = period_integral(c0 * 1.001, r);
    for (int i = 1; i < 200; ++i) {
        const double I = period_integral(c0 * (1.001 + 0.01 * i), r);
        CHECK(std::abs(I - prev) < 5e-3);
        prev = I;
    }
}

TEST_CASE("find_profile")
{
    const Regime r6 = regime_from_alpha(6.0);
    const ProfileSearch s = find_profile(3, r6);
    REQUIRE(s.c_star);
    CHECK(period_integral(*s.c_star, r6) == doctest::Approx(pi / 3).epsilon(1e-10));

    // alpha = 2: inf I_c = pi/sqrt(6) > pi/3, so k = 3 has no solution
    const ProfileSearch s2 = find_profile(3, regime_from_alpha(2.0));
    CHECK_FALSE(s2.c_star);
    CHECK(s2.I_min > pi / 3);

    for (int k = 2; k <= 4; ++k)
        CHECK_FALSE(find_profile(k, regime_from_alpha(-1.0)).c_star);
    CHECK_THROWS_AS(find_profile(0, r6), DomainError);
}

TEST_CASE("reconstructed profiles")
{
    const Regime r = regime_from_alpha(6.0);
    const double c = *find_profile(3, r).c_star;
    const HomogeneousProfile p = reconstruct_profile(c, 3, r);
    CHECK(3 * p.period == doctest::Approx(2 * pi).epsilon(1e-9));
    CHECK(p.ode_residual_max < 1e-6);
    double gmin = 1e300, gmax = -1e300;
    for (const ProfileSample& s : p.samples) {
        gmin = std::min(gmin, s.g);
        gmax = std::max(gmax, s.g);
        // (g')^2 = 2 h_c(g)
        CHECK(std::abs(s.dg * s.dg - 2 * envelope_value(s.g, c, r)) < 1e-8);
    }
    CHECK(gmin == doctest::Approx(p.envelope.t_minus).epsilon(1e-12));
    CHECK(gmax == doctest::Approx(p.envelope.t_plus).epsilon(1e-8));
    // periodic and even about the minimum
    for (double th : {0.1, 0.7, 1.3})
        CHECK(p.g(th) == doctest::Approx(p.g(-th)).epsilon(1e-9));
    CHECK(p.g(0.4 + p.period) == doctest::Approx(p.g(0.4)).epsilon(1e-9));

    const HomogeneousProfile rad = reconstruct_profile(tangency_c0(r).c0, 1, r);
    CHECK(rad.is_radial());
    CHECK(rad.g(1.234) == doctest::Approx(r.c_alpha));
}

TEST_CASE("assembled homogeneous solutions")
{
    const Regime r = regime_from_alpha(6.0);
    const HomogeneousProfile p = reconstruct_profile(*find_profile(3, r).c_star, 3, r);
    const DiscGrid g = DiscGrid::cartesian(128, 1.0);
    const ScalarField w = assemble_homogeneous(p, g);
    // w(2x) = 2^beta w(x) on nodes
    CHECK(w.at(96, 80) == doctest::Approx(std::pow(2.0, r.beta) * w.at(80, 72)).epsilon(1e-12));
    CHECK(homogeneous_value(p, Vec2(0.3, 0.2)) == doctest::Approx(w.sample(Vec2(0.3, 0.2))).epsilon(1e-5));
    // rotating by one period of g is a symmetry
    const Vec2 x(0.4, 0.1);
    const double a = p.period;
    const Vec2 y(std::cos(a) * x.x() - std::sin(a) * x.y(), std::sin(a) * x.x() + std::cos(a) * x.y());
    CHECK(homogeneous_value(p, y) == doctest::Approx(homogeneous_value(p, x)).epsilon(1e-10));

    const ScalarField rad = assemble_homogeneous(reconstruct_profile(tangency_c0(r).c0, 1, r), g);
    const ScalarField u0 = radial_solution(r, g);
    for (std::size_t k = 0; k < g.size(); ++k)
        if (u0.defined(k))
            CHECK(rad[k] == doctest::Approx(u0[k]).epsilon(1e-13));
}

}
