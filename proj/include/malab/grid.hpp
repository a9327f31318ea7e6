#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <vector>

namespace malab {

using Vec2 = Eigen::Vector2d;

enum class GridKind { cartesian, polar };

enum class NodeKind : std::uint8_t { inside, boundary, outside };

/// Structured grid over a disc (or, for dual fields, an axis-aligned box).
///
/// Cartesian nodes sit at (x1_lo + i h1, x2_lo + j h2) and are stored
/// row-major (i fastest). Polar nodes sit at (r_min + i dr, j dtheta) and are
/// stored (r, theta)-major (theta fastest); theta is periodic and the origin
/// is never meshed.
class DiscGrid {
public:
    /// Square grid of n cells across [-R, R]^2; nodes with |x| > R are outside.
    static DiscGrid cartesian(int n, double radius = 1.0);
    /// Same, with independent node counts per axis (anisotropic spacing).
    static DiscGrid cartesian(int n1, int n2, double radius);
    /// n1 x n2 nodes on [x1_lo, x1_hi] x [x2_lo, x2_hi]; no disc mask.
    static DiscGrid box(double x1_lo, double x1_hi, int n1, double x2_lo, double x2_hi, int n2);
    /// n_r rings on [r_min, radius], n_theta spokes. Default r_min = 2 dr.
    static DiscGrid polar(int n_r, int n_theta, double r_min, double radius = 1.0);

    GridKind kind() const noexcept { return kind_; }
    /// Disc radius; 0 for box grids.
    double radius() const noexcept { return radius_; }
    int n1() const noexcept { return n1_; }
    int n2() const noexcept { return n2_; }
    std::size_t size() const noexcept { return mask_.size(); }

    // Cartesian parameters.
    double x1_lo() const noexcept { return lo1_; }
    double x2_lo() const noexcept { return lo2_; }
    double h1() const noexcept { return h1_; }
    double h2() const noexcept { return h2_; }
    // Polar parameters (same storage, named for readability).
    double r_min() const noexcept { return lo1_; }
    double dr() const noexcept { return h1_; }
    double dtheta() const noexcept { return h2_; }

    /// Largest node spacing in physical units.
    double spacing() const noexcept;

    std::size_t index(int i, int j) const noexcept;
    int i_of(std::size_t k) const noexcept;
    int j_of(std::size_t k) const noexcept;
    Vec2 node(std::size_t k) const noexcept;
    Vec2 node(int i, int j) const noexcept;

    NodeKind mask(std::size_t k) const noexcept { return mask_[k]; }
    bool available(std::size_t k) const noexcept { return mask_[k] != NodeKind::outside; }
    const std::vector<NodeKind>& masks() const noexcept { return mask_; }
    /// Copy of this grid with a replacement mask (same size).
    DiscGrid with_mask(std::vector<NodeKind> mask) const;

    /// Index of the node nearest to x (polar: nearest in (r, theta)).
    std::size_t nearest(const Vec2& x) const;

    bool operator==(const DiscGrid& other) const;

private:
    DiscGrid() = default;

    GridKind kind_ = GridKind::cartesian;
    double radius_ = 0.0;
    int n1_ = 0;
    int n2_ = 0;
    double lo1_ = 0.0;
    double lo2_ = 0.0;
    double h1_ = 0.0;
    double h2_ = 0.0;
    std::vector<NodeKind> mask_;
};

}  // namespace malab
