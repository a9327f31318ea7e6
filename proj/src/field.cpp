#include "malab/field.hpp"

#include "malab/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

namespace malab {

namespace {

// Lagrange weights for nodes 0..3 at fractional position s (node units).
std::array<double, 4> cubic_weights(double s)
{
    return {-(s - 1) * (s - 2) * (s - 3) / 6.0,
            s * (s - 2) * (s - 3) / 2.0,
            -s * (s - 1) * (s - 3) / 2.0,
            s * (s - 1) * (s - 2) / 6.0};
}

// First stencil index and offset for a 4-point window on [0, n-1].
bool window(double t, int n, int& i0, double& s)
{
    constexpr double slack = 1e-9;
    if (n < 4 || t < -slack || t > n - 1 + slack)
        return false;
    i0 = std::clamp(int(std::floor(t)) - 1, 0, n - 4);
    s = t - i0;
    return true;
}

std::string where(const Vec2& x)
{
    std::ostringstream os;
    os << "(" << x.x() << ", " << x.y() << ")";
    return os.str();
}

}  // namespace

ScalarField::ScalarField(DiscGrid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values))
{
    if (values_.size() != grid_.size())
        throw DomainError("field value count does not match grid size");
}

ScalarField ScalarField::from_function(const DiscGrid& grid,
                                       const std::function<double(const Vec2&)>& f)
{
    std::vector<double> v(grid.size());
    for (std::size_t k = 0; k < v.size(); ++k)
        v[k] = f(grid.node(k));
    return ScalarField(grid, std::move(v));
}

bool ScalarField::defined(std::size_t k) const noexcept
{
    return grid_.available(k) && std::isfinite(values_[k]);
}

std::optional<double> ScalarField::try_sample(const Vec2& x) const
{
    const DiscGrid& g = grid_;
    int i0 = 0, j0 = 0;
    double si = 0, sj = 0;
    bool periodic = false;
    if (g.kind() == GridKind::cartesian) {
        if (!window((x.x() - g.x1_lo()) / g.h1(), g.n1(), i0, si)
            || !window((x.y() - g.x2_lo()) / g.h2(), g.n2(), j0, sj))
            return std::nullopt;
    } else {
        if (!window((x.norm() - g.r_min()) / g.dr(), g.n1(), i0, si))
            return std::nullopt;
        double t = std::atan2(x.y(), x.x());
        if (t < 0)
            t += 2.0 * std::numbers::pi;
        const double tj = t / g.dtheta();
        j0 = int(std::floor(tj)) - 1;
        sj = tj - j0;
        periodic = true;
    }
    const auto wi = cubic_weights(si);
    const auto wj = cubic_weights(sj);
    double acc = 0.0;
    for (int b = 0; b < 4; ++b) {
        int j = j0 + b;
        if (periodic)
            j = ((j % g.n2()) + g.n2()) % g.n2();
        for (int a = 0; a < 4; ++a) {
            const std::size_t k = g.index(i0 + a, j);
            if (!defined(k))
                return std::nullopt;
            acc += wi[a] * wj[b] * values_[k];
        }
    }
    return acc;
}

double ScalarField::sample(const Vec2& x) const
{
    if (auto v = try_sample(x))
        return *v;
    throw OutOfDomainError("interpolation stencil leaves the field at " + where(x));
}

ScalarField radial_solution(const Regime& regime, const DiscGrid& grid)
{
    ScalarField u = ScalarField::from_function(grid, [&](const Vec2& x) {
        return regime.c_alpha * std::pow(x.norm(), regime.beta);
    });
    u.gradient_origin = Vec2::Zero();
    return u;
}

Mat2 hessian_fd(const ScalarField& f, std::size_t k)
{
    const DiscGrid& g = f.grid();
    const int i = g.i_of(k);
    const int j = g.j_of(k);
    auto need = [&](int a, int b) {
        if (a < 0 || a >= g.n1() || b < 0 || b >= g.n2())
            throw OutOfDomainError("FD stencil exits the grid at node " + where(g.node(k)));
        const std::size_t m = g.index(a, b);
        if (!f.defined(m))
            throw OutOfDomainError("FD stencil exits the domain at node " + where(g.node(k)));
        return f[m];
    };

    if (g.kind() == GridKind::cartesian) {
        const double h1 = g.h1(), h2 = g.h2();
        const double c = need(i, j);
        Mat2 H;
        H(0, 0) = (need(i + 1, j) - 2 * c + need(i - 1, j)) / (h1 * h1);
        H(1, 1) = (need(i, j + 1) - 2 * c + need(i, j - 1)) / (h2 * h2);
        H(0, 1) = H(1, 0) = (need(i + 1, j + 1) - need(i + 1, j - 1) - need(i - 1, j + 1)
                             + need(i - 1, j - 1)) / (4 * h1 * h2);
        return H;
    }

    const int n = g.n2();
    const int jp = (j + 1) % n, jm = (j + n - 1) % n;
    const double dr = g.dr(), dt = g.dtheta();
    const double r = g.r_min() + i * dr;
    const double c = need(i, j);
    const double ur = (need(i + 1, j) - need(i - 1, j)) / (2 * dr);
    const double urr = (need(i + 1, j) - 2 * c + need(i - 1, j)) / (dr * dr);
    const double ut = (need(i, jp) - need(i, jm)) / (2 * dt);
    const double utt = (need(i, jp) - 2 * c + need(i, jm)) / (dt * dt);
    const double urt = (need(i + 1, jp) - need(i + 1, jm) - need(i - 1, jp) + need(i - 1, jm))
                     / (4 * dr * dt);
    Mat2 P;
    P(0, 0) = urr;
    P(0, 1) = P(1, 0) = urt / r - ut / (r * r);
    P(1, 1) = ur / r + utt / (r * r);
    const double th = j * dt;
    Mat2 Q;
    Q << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
    return Q * P * Q.transpose();
}

double hessian_determinant_fd(const ScalarField& field, const Vec2& point)
{
    return hessian_fd(field, field.grid().nearest(point)).determinant();
}

}  // namespace malab
