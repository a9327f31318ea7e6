#include "doctest.h"

#include "malab/masolver.hpp"

#include <cmath>

using namespace malab;

namespace {

double sup_inside(const ScalarField& u, const std::function<double(const Vec2&)>& f, double r_min = 0.0)
{
    double e = 0.0;
    const DiscGrid& g = u.grid();
    for (std::size_t k = 0; k < g.size(); ++k)
        if (g.mask(k) == NodeKind::inside && g.node(k).norm() >= r_min)
            e = std::max(e, std::abs(u[k] - f(g.node(k))));
    return e;
}

}  // namespace

TEST_SUITE("masolver") {

TEST_CASE("quadratic data is reproduced")
{
    DirichletProblem p{PowerRhs{1.0, 0.0}, [](const Vec2& x) { return 0.5 * x.squaredNorm(); },
                       DiscGrid::cartesian(32, 1.0)};
    const ConvexSolution s = solve(p);
    CHECK(sup_inside(s.field, p.boundary) < 1e-9);
    CHECK(s.residual_sup < 1e-8);
    CHECK(residual(s, p) == doctest::Approx(s.residual_sup));
    CHECK(s.convexity_margin > 0.0);
}

TEST_CASE("manufactured quartic converges at second order")
{
    auto exact = [](const Vec2& x) { return std::pow(x.x(), 4) + x.y() * x.y(); };
    double err[2];
    int i = 0;
    for (int n : {32, 64}) {
        const DiscGrid g = DiscGrid::cartesian(n, 1.0);
        const auto f = ScalarField::from_function(g, [](const Vec2& x) { return 24 * x.x() * x.x(); });
        const ConvexSolution s = solve({f, exact, g});
        err[i++] = sup_inside(s.field, exact);
    }
    CHECK(std::log2(err[0] / err[1]) > 1.8);
}

TEST_CASE("radial solution is recovered")
{
    for (double alpha : {2.0, -0.5}) {
        const Regime r = regime_from_alpha(alpha);
        auto u0 = [&](const Vec2& x) { return r.c_alpha * std::pow(x.norm(), r.beta); };
        const ConvexSolution s = solve({PowerRhs{1.0, alpha}, u0, DiscGrid::cartesian(64, 1.0)});
        CHECK(sup_inside(s.field, u0, 0.1) < 5e-3);
    }
}

TEST_CASE("comparison principle")
{
    const DiscGrid g = DiscGrid::cartesian(32, 1.0);
    auto b1 = [](const Vec2& x) { return 0.5 * x.squaredNorm() + 0.1 * std::cos(3 * std::atan2(x.y(), x.x())); };
    auto b2 = [&](const Vec2& x) { return b1(x) + 0.05 + 0.02 * x.x(); };
    const ConvexSolution s1 = solve({PowerRhs{2.0, 1.0}, b1, g});
    const ConvexSolution s2 = solve({PowerRhs{1.0, 1.0}, b2, g});
    for (std::size_t k = 0; k < g.size(); ++k)
        if (g.mask(k) == NodeKind::inside)
            CHECK(s1.field[k] <= s2.field[k] + 1e-10);
}

TEST_CASE("adding an affine function to the data adds it to the solution")
{
    const DiscGrid g = DiscGrid::cartesian(32, 1.0);
    const Regime r = regime_from_alpha(2.0);
    auto b = [&](const Vec2& x) { return r.c_alpha * std::pow(x.norm(), 3) - 0.05 * std::cos(2 * std::atan2(x.y(), x.x())); };
    auto ell = [](const Vec2& x) { return 0.3 - 0.2 * x.x() + 0.7 * x.y(); };
    const ConvexSolution s1 = solve({PowerRhs{1.0, 2.0}, b, g});
    const ConvexSolution s2 = solve({PowerRhs{1.0, 2.0}, [&](const Vec2& x) { return b(x) + ell(x); }, g});
    for (std::size_t k = 0; k < g.size(); ++k)
        if (g.mask(k) == NodeKind::inside)
            CHECK(std::abs(s2.field[k] - s1.field[k] - ell(g.node(k))) < 1e-8);
}

TEST_CASE("invariance under the lattice rotation by 90 degrees")
{
    // A unimodular map that preserves the grid and the stencil set.
    const DiscGrid g = DiscGrid::cartesian(32, 1.0);
    auto b = [](const Vec2& x) { return 0.5 * x.squaredNorm() + 0.1 * x.x() * x.x() * x.y(); };
    auto bR = [&](const Vec2& x) { return b(Vec2(-x.y(), x.x())); };
    const ConvexSolution s = solve({PowerRhs{1.0, 0.0}, b, g});
    const ConvexSolution sR = solve({PowerRhs{1.0, 0.0}, bR, g});
    for (int i = 0; i < g.n1(); ++i)
        for (int j = 0; j < g.n2(); ++j) {
            const std::size_t k = g.index(i, j);
            if (g.mask(k) != NodeKind::inside)
                continue;
            // node (i, j) maps to (-y, x)
            CHECK(std::abs(sR.field[k] - s.field.at(g.n1() - 1 - j, i)) < 1e-8);
        }
}

TEST_CASE("cell averages of |x|^alpha")
{
    CHECK(power_cell_average(0.0, 0.3) == doctest::Approx(1.0));
    // mean of x^2 + y^2 over [-s, s]^2 is 2 s^2 / 3
    CHECK(power_cell_average(2.0, 0.3) == doctest::Approx(2 * 0.09 / 3).epsilon(1e-12));
    // 1/r over [-s, s]^2: 8 s asinh(1) / (4 s^2)
    CHECK(power_cell_average(-1.0, 0.5) == doctest::Approx(2 * std::asinh(1.0) / 0.5).epsilon(1e-10));
    CHECK(power_cell_average(2.0, 0.1, Vec2(0.5, 0.2)) == doctest::Approx(0.29 + 2 * 0.01 / 3).epsilon(1e-12));
    // scaling: average over s equals s^alpha times average over 1
    CHECK(power_cell_average(-1.5, 0.01) == doctest::Approx(std::pow(0.01, -1.5) * power_cell_average(-1.5, 1.0)).epsilon(1e-10));
}

TEST_CASE("rhs at nodes")
{
    const DiscGrid g = DiscGrid::cartesian(16, 1.0);
    const DirichletProblem p{PowerRhs{2.0, -1.0}, [](const Vec2&) { return 0.0; }, g};
    const std::size_t origin = g.nearest(Vec2::Zero());
    CHECK(rhs_at(p, origin) == doctest::Approx(2.0 * power_cell_average(-1.0, 0.5 * g.h1())));
    CHECK(rhs_at(p, g.index(12, 8)) == doctest::Approx(2.0 / 0.5));
}

TEST_CASE("problem files")
{
    const DirichletProblem p = parse_problem("alpha=2\nc=1\neps=0.05\nboundary=c_alpha*r^beta - eps*cos(2*theta)\ngrid=cartesian:32\n");
    const Regime r = regime_from_alpha(2.0);
    CHECK(p.grid.n1() == 33);
    CHECK(p.boundary(Vec2(0.0, 1.0)) == doctest::Approx(r.c_alpha + 0.05));
    const DirichletProblem q = parse_problem("alpha=0\nboundary=samples:1,2,1,2\ngrid=cartesian:16:2\n");
    CHECK(q.grid.radius() == doctest::Approx(2.0));
    CHECK(q.boundary(Vec2(0.0, 2.0)) == doctest::Approx(2.0));
    CHECK_THROWS_AS(parse_problem("alpha=-2\nboundary=1\n"), DomainError);
    // without boundary= the radial solution is used
    const DirichletProblem d = parse_problem("alpha=1\n");
    const Regime r1 = regime_from_alpha(1.0);
    CHECK(d.boundary(Vec2(0.6, 0.8)) == doctest::Approx(r1.c_alpha));
    CHECK_THROWS(parse_problem("alpha=1\nboundary=foo(x1)\n"));
}

TEST_CASE("invalid problems")
{
    SolverOptions o;
    o.tol = 0.0;
    const DirichletProblem p{PowerRhs{1.0, 0.0}, [](const Vec2& x) { return x.squaredNorm(); }, DiscGrid::cartesian(8, 1.0)};
    CHECK_THROWS_AS(solve(p, o), DomainError);
    CHECK_THROWS_AS(solve({PowerRhs{-1.0, 0.0}, p.boundary, p.grid}), DomainError);
    CHECK_THROWS_AS(solve({PowerRhs{1.0, 0.0}, p.boundary, DiscGrid::polar(8, 16, 0.1, 1.0)}), DomainError);
}

}
