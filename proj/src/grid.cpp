#include "malab/grid.hpp"

#include "malab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace malab {

DiscGrid DiscGrid::cartesian(int n, double radius)
{
    return cartesian(n, n, radius);
}

DiscGrid DiscGrid::cartesian(int n1, int n2, double radius)
{
    if (n1 < 4 || n2 < 4 || !(radius > 0.0))
        throw DomainError("cartesian grid needs n >= 4 cells and radius > 0");
    DiscGrid g;
    g.kind_ = GridKind::cartesian;
    g.radius_ = radius;
    g.n1_ = n1 + 1;
    g.n2_ = n2 + 1;
    g.h1_ = 2.0 * radius / n1;
    g.h2_ = 2.0 * radius / n2;
    g.lo1_ = -radius;
    g.lo2_ = -radius;
    g.mask_.resize(std::size_t(g.n1_) * g.n2_);
    const double tol = 1e-12 * radius;
    for (std::size_t k = 0; k < g.mask_.size(); ++k) {
        const double r = g.node(k).norm();
        g.mask_[k] = r < radius - tol ? NodeKind::inside
                   : r <= radius + tol ? NodeKind::boundary
                                       : NodeKind::outside;
    }
    return g;
}

DiscGrid DiscGrid::box(double x1_lo, double x1_hi, int n1, double x2_lo, double x2_hi, int n2)
{
    if (n1 < 2 || n2 < 2 || !(x1_hi > x1_lo) || !(x2_hi > x2_lo))
        throw DomainError("box grid needs at least 2x2 nodes and a nonempty box");
    DiscGrid g;
    g.kind_ = GridKind::cartesian;
    g.radius_ = 0.0;
    g.n1_ = n1;
    g.n2_ = n2;
    g.lo1_ = x1_lo;
    g.lo2_ = x2_lo;
    g.h1_ = (x1_hi - x1_lo) / (n1 - 1);
    g.h2_ = (x2_hi - x2_lo) / (n2 - 1);
    g.mask_.assign(std::size_t(n1) * n2, NodeKind::inside);
    for (int j = 0; j < n2; ++j)
        for (int i = 0; i < n1; ++i)
            if (i == 0 || j == 0 || i == n1 - 1 || j == n2 - 1)
                g.mask_[g.index(i, j)] = NodeKind::boundary;
    return g;
}

DiscGrid DiscGrid::polar(int n_r, int n_theta, double r_min, double radius)
{
    if (n_r < 4 || n_theta < 8 || !(radius > 0.0))
        throw DomainError("polar grid needs n_r >= 4, n_theta >= 8, radius > 0");
    DiscGrid g;
    g.kind_ = GridKind::polar;
    g.radius_ = radius;
    g.n1_ = n_r;
    g.n2_ = n_theta;
    if (r_min <= 0.0) {
        g.h1_ = radius / (n_r + 1);
        g.lo1_ = 2.0 * g.h1_;
    } else {
        if (r_min >= radius)
            throw DomainError("polar grid needs r_min < radius");
        g.lo1_ = r_min;
        g.h1_ = (radius - r_min) / (n_r - 1);
    }
    g.lo2_ = 0.0;
    g.h2_ = 2.0 * std::numbers::pi / n_theta;
    g.mask_.assign(std::size_t(n_r) * n_theta, NodeKind::inside);
    for (int j = 0; j < n_theta; ++j)
        g.mask_[g.index(n_r - 1, j)] = NodeKind::boundary;
    return g;
}

double DiscGrid::spacing() const noexcept
{
    if (kind_ == GridKind::cartesian)
        return std::max(h1_, h2_);
    return std::max(h1_, radius_ * h2_);
}

std::size_t DiscGrid::index(int i, int j) const noexcept
{
    if (kind_ == GridKind::cartesian)
        return std::size_t(j) * n1_ + i;
    return std::size_t(i) * n2_ + j;
}

int DiscGrid::i_of(std::size_t k) const noexcept
{
    return kind_ == GridKind::cartesian ? int(k % n1_) : int(k / n2_);
}

int DiscGrid::j_of(std::size_t k) const noexcept
{
    return kind_ == GridKind::cartesian ? int(k / n1_) : int(k % n2_);
}

Vec2 DiscGrid::node(int i, int j) const noexcept
{
    if (kind_ == GridKind::cartesian)
        return {lo1_ + i * h1_, lo2_ + j * h2_};
    const double r = lo1_ + i * h1_;
    const double t = j * h2_;
    return {r * std::cos(t), r * std::sin(t)};
}

Vec2 DiscGrid::node(std::size_t k) const noexcept
{
    return node(i_of(k), j_of(k));
}

DiscGrid DiscGrid::with_mask(std::vector<NodeKind> mask) const
{
    if (mask.size() != mask_.size())
        throw DomainError("mask size does not match grid");
    DiscGrid g = *this;
    g.mask_ = std::move(mask);
    return g;
}

std::size_t DiscGrid::nearest(const Vec2& x) const
{
    if (kind_ == GridKind::cartesian) {
        const int i = std::clamp(int(std::lround((x.x() - lo1_) / h1_)), 0, n1_ - 1);
        const int j = std::clamp(int(std::lround((x.y() - lo2_) / h2_)), 0, n2_ - 1);
        return index(i, j);
    }
    const double r = x.norm();
    double t = std::atan2(x.y(), x.x());
    if (t < 0)
        t += 2.0 * std::numbers::pi;
    const int i = std::clamp(int(std::lround((r - lo1_) / h1_)), 0, n1_ - 1);
    const int j = int(std::lround(t / h2_)) % n2_;
    return index(i, j);
}

bool DiscGrid::operator==(const DiscGrid& o) const
{
    return kind_ == o.kind_ && radius_ == o.radius_ && n1_ == o.n1_ && n2_ == o.n2_
        && lo1_ == o.lo1_ && lo2_ == o.lo2_ && h1_ == o.h1_ && h2_ == o.h2_ && mask_ == o.mask_;
}

}  // namespace malab
