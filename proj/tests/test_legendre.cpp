#include "doctest.h"

#include "malab/errors.hpp"
#include "malab/legendre.hpp"

#include "json.hpp"

#include <cmath>
#include <random>

using namespace malab;

namespace {

double sup_on_common(const ScalarField& a, const ScalarField& b, int* count = nullptr)
{
    double e = 0.0;
    int n = 0;
    for (std::size_t k = 0; k < a.grid().size(); ++k)
        if (a.defined(k) && b.defined(k)) {
            e = std::max(e, std::abs(a[k] - b[k]));
            ++n;
        }
    if (count)
        *count = n;
    return e;
}

}  // namespace

TEST_SUITE("legendre") {

TEST_CASE("involution on a smooth strictly convex field")
{
    const DiscGrid g = DiscGrid::box(-1, 1, 129, -1, 1, 129);
    const auto u = ScalarField::from_function(g, [](const Vec2& x) {
        return std::exp(x.y() + 0.3 * x.x()) + 0.5 * x.y() * x.y() + std::sin(x.x());
    });
    const PartialLegendrePair p = partial_legendre(u);
    const PartialLegendrePair q = partial_legendre(p.dual, g);
    int n = 0;
    CHECK(sup_on_common(q.dual, u, &n) < 1e-8);
    CHECK(n > int(g.size()) / 2);
}

TEST_CASE("transform of the model polynomial")
{
    // p = a|x1|^{2+alpha} + b x1 x2 + d x2^2  ->  -a|y1|^{2+alpha} + (y2 - b y1)^2 / (4d)
    const double a = 0.7, b = 0.4, d = 1.3, alpha = 2.0;
    const DiscGrid g = DiscGrid::box(-1, 1, 65, -1, 1, 65);
    const auto p = ScalarField::from_function(g, [&](const Vec2& x) {
        return a * std::pow(std::abs(x.x()), 2 + alpha) + b * x.x() * x.y() + d * x.y() * x.y();
    });
    const PartialLegendrePair t = partial_legendre(p);
    double e = 0.0;
    for (std::size_t k = 0; k < t.dual.grid().size(); ++k)
        if (t.dual.defined(k)) {
            const Vec2 y = t.dual.grid().node(k);
            e = std::max(e, std::abs(t.dual[k] - (-a * std::pow(std::abs(y.x()), 2 + alpha)
                                                  + std::pow(y.y() - b * y.x(), 2) / (4 * d))));
        }
    CHECK(e < 1e-8);
    // the image of each node is (x1, u_x2)
    const std::size_t k = g.index(40, 20);
    const Vec2 x = g.node(k);
    CHECK(t.image[k].x() == doctest::Approx(x.x()));
    CHECK(t.image[k].y() == doctest::Approx(b * x.x() + 2 * d * x.y()).epsilon(1e-10));
}

TEST_CASE("dual is concave in y1 and convex in y2 for det = |x1|^alpha")
{
    const DiscGrid g = DiscGrid::box(-1, 1, 65, -1, 1, 65);
    const auto m = ScalarField::from_function(
        g, [](const Vec2& x) { return std::pow(x.x(), 4) / 12 + 0.5 * x.y() * x.y() + 0.1 * x.x(); });
    const ScalarField& w = partial_legendre(m).dual;
    const DiscGrid& dg = w.grid();
    for (int i = 1; i + 1 < dg.n1(); i += 7)
        for (int j = 1; j + 1 < dg.n2(); j += 7) {
            const double c = w.at(i, j);
            const double d11 = w.at(i + 1, j) - 2 * c + w.at(i - 1, j);
            const double d22 = w.at(i, j + 1) - 2 * c + w.at(i, j - 1);
            if (std::isfinite(d11) && std::isfinite(d22)) {
                CHECK(d11 <= 1e-10);
                CHECK(d22 >= -1e-10);
            }
        }
}

TEST_CASE("contraction in sup norm")
{
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    const DiscGrid g = DiscGrid::box(-1, 1, 65, -1, 1, 65);
    for (int trial = 0; trial < 5; ++trial) {
        const double c1 = U(rng), c2 = U(rng), s = 0.02 * U(rng);
        auto base = [&](const Vec2& x) { return std::cosh(x.y() + 0.2 * c1 * x.x()) + 0.5 * x.y() * x.y() + c2 * x.x(); };
        const auto u = ScalarField::from_function(g, base);
        const auto v = ScalarField::from_function(
            g, [&](const Vec2& x) { return base(x) + s * std::sin(2 * x.y() + x.x()) * 0.1; });
        const PartialLegendrePair pu = partial_legendre(u);
        const PartialLegendrePair pv = partial_legendre(v, pu.dual.grid());
        // slack: resampling error of the quintic Hermite interpolant
        CHECK(sup_on_common(pu.dual, pv.dual) <= sup_on_common(u, v) + 1e-7);
    }
}

TEST_CASE("non-convex slices are rejected")
{
    const DiscGrid g = DiscGrid::box(-1, 1, 33, -1, 1, 33);
    const auto u = ScalarField::from_function(g, [](const Vec2& x) { return std::sin(3 * x.y()) + x.x(); });
    CHECK_THROWS_AS(partial_legendre(u), DegeneracyError);
    CHECK_THROWS_AS(partial_legendre(ScalarField::from_function(DiscGrid::polar(8, 16, 0.1, 1.0),
                                                                [](const Vec2& x) { return x.squaredNorm(); })),
                    DomainError);
}

TEST_CASE("degenerate linear solver on a manufactured solution")
{
    // w = y2^2/2 - |y1|^{2+alpha}/((alpha+2)(alpha+1)) solves w11 + |y1|^alpha w22 = 0
    for (double alpha : {2.0, 1.0}) {
        auto man = [&](const Vec2& y) {
            return 0.5 * y.y() * y.y() - std::pow(std::abs(y.x()), 2 + alpha) / ((alpha + 2) * (alpha + 1));
        };
        double err[2];
        int i = 0;
        for (int n : {64, 128}) {
            const DiscGrid g = DiscGrid::cartesian(n, 1.0);
            const ScalarField w = solve_degenerate_linear(alpha, 1.0, man, g);
            err[i] = 0.0;
            for (std::size_t k = 0; k < g.size(); ++k)
                if (g.mask(k) == NodeKind::inside)
                    err[i] = std::max(err[i], std::abs(w[k] - man(g.node(k))));
            ++i;
        }
        CHECK(err[1] < 2e-3);
        CHECK(err[1] < err[0]);
    }
    CHECK_THROWS_AS(solve_degenerate_linear(-0.5, 1.0, [](const Vec2&) { return 0.0; }, DiscGrid::cartesian(16, 1.0)),
                    DomainError);
}

TEST_CASE("degenerate solver obeys the maximum principle")
{
    const DiscGrid g = DiscGrid::cartesian(64, 1.0);
    auto bd = [](const Vec2& y) { return std::cos(3 * std::atan2(y.y(), y.x())) + 0.3 * y.x(); };
    const ScalarField w = solve_degenerate_linear(1.0, 2.0, bd, g);
    double lo = 1e300, hi = -1e300;
    for (int m = 0; m < 720; ++m) {
        const double a = 2 * M_PI * m / 720;
        const double b = bd(Vec2(std::cos(a), std::sin(a)));
        lo = std::min(lo, b);
        hi = std::max(hi, b);
    }
    for (std::size_t k = 0; k < g.size(); ++k)
        if (g.mask(k) == NodeKind::inside) {
            CHECK(w[k] <= hi + 1e-12);
            CHECK(w[k] >= lo - 1e-12);
        }
}

TEST_CASE("expansion coefficients of the model solution")
{
    const double alpha = 2.0;
    const DiscGrid g = DiscGrid::cartesian(256, 1.0);
    const auto w = ScalarField::from_function(g, [&](const Vec2& y) {
        return 0.3 + 0.1 * y.x() - 0.2 * y.y() + 0.05 * y.x() * y.y()
             + 0.7 * (0.5 * y.y() * y.y() - std::pow(std::abs(y.x()), 2 + alpha) / 12);
    });
    const ExpansionReport r = expansion_coefficients(w, alpha);
    CHECK(r.a0 == doctest::Approx(0.3).epsilon(1e-9));
    CHECK(r.a1.x() == doctest::Approx(0.1).epsilon(1e-9));
    CHECK(r.a1.y() == doctest::Approx(-0.2).epsilon(1e-9));
    CHECK(r.a2 == doctest::Approx(0.05).epsilon(1e-8));
    CHECK(r.a3 == doctest::Approx(0.7).epsilon(1e-9));
    CHECK(r.windows.size() >= 4);
    const auto j = nlohmann::json::parse(to_json(r));
    CHECK(j.contains("remainder_exponent"));
    CHECK(j["windows"].size() == r.windows.size());
}

TEST_CASE("expansion fit needs resolved windows")
{
    const DiscGrid g = DiscGrid::cartesian(32, 1.0);
    const auto w = ScalarField::from_function(g, [](const Vec2& y) { return y.y() * y.y(); });
    CHECK_THROWS_AS(expansion_coefficients(w, 2.0), FitError);
}

}
