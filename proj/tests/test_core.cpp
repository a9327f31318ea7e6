#include "doctest.h"

#include "malab/errors.hpp"
#include "malab/expression.hpp"
#include "malab/field.hpp"
#include "malab/regime.hpp"

#include <cmath>
#include <sstream>

using namespace malab;

TEST_SUITE("core") {

TEST_CASE("regime constants")
{
    for (double a : {-1.9, -1.5, -1.0, -0.5, 0.0, 1.0, 2.0, 6.0, 20.0}) {
        const Regime r = regime_from_alpha(a);
        CHECK(r.beta == doctest::Approx(2 + a / 2).epsilon(1e-15));
        CHECK(r.beta * r.beta * (r.beta - 1) * r.c_alpha * r.c_alpha == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(r.gamma > -1.0);
        CHECK(r.gamma < 1.0);
    }
    const Regime r0 = regime_from_alpha(0.0);
    CHECK(r0.beta == 2.0);
    CHECK(r0.gamma == 0.0);
    CHECK(r0.c_alpha == doctest::Approx(0.5));

    const Regime r2 = regime_from_alpha(2.0);
    CHECK(r2.gamma == doctest::Approx(-1.0 / 3));
    CHECK(r2.c_alpha == doctest::Approx(1 / (3 * std::sqrt(2.0))).epsilon(1e-14));
    CHECK(r2.J0 == doctest::Approx(3 * std::pow(2.0, -2.0 / 3)).epsilon(1e-13));

    const Regime rm = regime_from_alpha(-1.0);
    CHECK(rm.gamma == doctest::Approx(1.0 / 3));
    CHECK(rm.c_alpha == doctest::Approx(0.9428090416).epsilon(1e-9));

    CHECK_THROWS_AS(regime_from_alpha(-2.0), DomainError);
    CHECK_THROWS_AS(regime_from_alpha(-3.0), DomainError);
}

TEST_CASE("cartesian grid mask and indexing")
{
    const DiscGrid g = DiscGrid::cartesian(16, 1.0);
    CHECK(g.n1() == 17);
    CHECK(g.h1() == doctest::Approx(0.125));
    int inside = 0, boundary = 0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        CHECK(g.index(g.i_of(k), g.j_of(k)) == k);
        const double r = g.node(k).norm();
        if (g.mask(k) == NodeKind::outside)
            CHECK(r > 1.0 - 1e-12);
        else
            CHECK(r <= 1.0 + 1e-12);
        inside += g.mask(k) == NodeKind::inside;
        boundary += g.mask(k) == NodeKind::boundary;
    }
    CHECK(inside > 0);
    CHECK(boundary >= 4);  // the four axis points sit on the circle
    CHECK(g.node(g.nearest(Vec2(0.01, -0.02))).norm() == doctest::Approx(0.0));
}

TEST_CASE("polar grid excludes the origin")
{
    const DiscGrid g = DiscGrid::polar(32, 64, 0.0, 1.0);
    CHECK(g.r_min() > 0.0);
    CHECK(g.r_min() == doctest::Approx(2 * g.dr()));
    for (std::size_t k = 0; k < g.size(); ++k)
        CHECK(g.node(k).norm() >= g.r_min() - 1e-12);
    CHECK_THROWS_AS(DiscGrid::polar(32, 64, 2.0, 1.0), DomainError);
}

TEST_CASE("radial solution values and homogeneity")
{
    const Regime r = regime_from_alpha(2.0);
    const DiscGrid g = DiscGrid::cartesian(64, 1.0);
    const ScalarField u = radial_solution(r, g);
    REQUIRE(u.gradient_origin);
    CHECK(u.gradient_origin->norm() == 0.0);
    CHECK(u.at(64, 32) == doctest::Approx(r.c_alpha));
    // u0(2x) / u0(x) = 2^beta on nodes
    CHECK(u.at(48, 40) / u.at(40, 36) == doctest::Approx(std::pow(2.0, r.beta)).epsilon(1e-13));
}

TEST_CASE("FD Hessian determinant on quadratics is exact")
{
    const DiscGrid g = DiscGrid::cartesian(40, 1.0);
    const auto q = ScalarField::from_function(g, [](const Vec2& x) {
        return 1.5 * x.x() * x.x() + 0.4 * x.x() * x.y() + 0.7 * x.y() * x.y() - 0.3 * x.x() + 2.0;
    });
    const double det = 3.0 * 1.4 - 0.4 * 0.4;
    for (const Vec2 p : {Vec2(0, 0), Vec2(0.3, -0.2), Vec2(-0.5, 0.4)})
        CHECK(std::abs(hessian_determinant_fd(q, p) - det) < 1e-11);
    const auto half = ScalarField::from_function(g, [](const Vec2& x) { return 0.5 * x.squaredNorm(); });
    CHECK(hessian_determinant_fd(half, Vec2(0.2, 0.1)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("FD determinant of the radial solution converges at second order")
{
    const Regime r = regime_from_alpha(2.0);
    double err[3];
    int i = 0;
    for (int n : {40, 80, 160}) {
        const DiscGrid g = DiscGrid::cartesian(n, 1.0);
        err[i++] = std::abs(hessian_determinant_fd(radial_solution(r, g), Vec2(0.6, 0.0)) - 0.36);
    }
    CHECK(std::log2(err[0] / err[1]) > 1.8);
    CHECK(std::log2(err[1] / err[2]) > 1.8);
}

TEST_CASE("FD determinant of the non-radial model")
{
    // |x1|^4/12 + x2^2/2 has det = x1^2
    const DiscGrid g = DiscGrid::cartesian(200, 1.0);
    const auto m = ScalarField::from_function(
        g, [](const Vec2& x) { return std::pow(x.x(), 4) / 12 + 0.5 * x.y() * x.y(); });
    for (double x1 : {0.2, 0.5, -0.7})
        CHECK(std::abs(hessian_determinant_fd(m, Vec2(x1, 0.1)) - x1 * x1) < 1e-4);
}

TEST_CASE("FD stencil leaving the disc")
{
    const DiscGrid g = DiscGrid::cartesian(16, 1.0);
    const auto u = radial_solution(regime_from_alpha(0.0), g);
    CHECK_THROWS_AS(hessian_determinant_fd(u, Vec2(1.0, 0.0)), OutOfDomainError);
}

TEST_CASE("sampling reproduces cubics")
{
    const DiscGrid g = DiscGrid::cartesian(32, 1.0);
    auto f = [](const Vec2& x) { return x.x() * x.x() * x.y() - 0.5 * std::pow(x.y(), 3) + x.x(); };
    const auto u = ScalarField::from_function(g, f);
    for (const Vec2 p : {Vec2(0.123, -0.31), Vec2(-0.4, 0.05)})
        CHECK(u.sample(p) == doctest::Approx(f(p)).epsilon(1e-12));
    CHECK_FALSE(u.try_sample(Vec2(0.99, 0.1)));
    CHECK_THROWS_AS(u.sample(Vec2(0.99, 0.1)), OutOfDomainError);
}

TEST_CASE("field text round trip")
{
    for (const DiscGrid& g : {DiscGrid::cartesian(12, 1.0), DiscGrid::polar(6, 12, 0.1, 1.0)}) {
        const auto u = ScalarField::from_function(g, [](const Vec2& x) { return std::exp(x.x()) * x.y(); });
        std::stringstream s;
        write_field(s, u);
        const ScalarField v = read_field(s);
        CHECK(v.grid() == u.grid());
        for (std::size_t k = 0; k < g.size(); ++k)
            if (u.defined(k))
                CHECK(v[k] == u[k]);
    }
    std::stringstream bad("mesh polar");
    CHECK_THROWS_AS(read_field(bad), DomainError);
}

TEST_CASE("expressions")
{
    const Expression e("2^3^2 - -x*sin(pi/2) + sqrt(abs(y))");
    CHECK(e({{"x", 1.5}, {"y", -4.0}}) == doctest::Approx(512 + 1.5 + 2));
    CHECK_THROWS(Expression("1 + (2"));
}

}
