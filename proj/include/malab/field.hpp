#pragma once

#include "malab/grid.hpp"
#include "malab/regime.hpp"

#include <Eigen/Core>
#include <Eigen/LU>

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace malab {

using Mat2 = Eigen::Matrix2d;

/// Nodal values of a function on a DiscGrid.
///
/// NaN marks nodes where the function is undefined; those nodes are treated
/// as outside by every consumer.
class ScalarField {
public:
    ScalarField(DiscGrid grid, std::vector<double> values);

    static ScalarField from_function(const DiscGrid& grid,
                                     const std::function<double(const Vec2&)>& f);

    const DiscGrid& grid() const noexcept { return grid_; }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t k) const noexcept { return values_[k]; }
    double at(int i, int j) const noexcept { return values_[grid_.index(i, j)]; }
    /// True when the node is available on the grid and carries a finite value.
    bool defined(std::size_t k) const noexcept;

    /// Cubic (4x4 Lagrange) interpolation. Throws OutOfDomainError when the
    /// stencil needs undefined nodes.
    double sample(const Vec2& x) const;
    /// Like sample() but returns nullopt instead of throwing.
    std::optional<double> try_sample(const Vec2& x) const;

    /// Gradient at the origin, set when the field is anchored (u(0)=0, grad u(0)=0).
    std::optional<Vec2> gradient_origin;

private:
    DiscGrid grid_;
    std::vector<double> values_;
};

/// c_alpha |x|^beta on every node.
ScalarField radial_solution(const Regime& regime, const DiscGrid& grid);

/// Centered-difference Hessian at node k. Cartesian grids use the 9-point
/// stencil, polar grids the native polar differences rotated to (x1, x2).
/// Throws OutOfDomainError when the stencil leaves the defined region.
Mat2 hessian_fd(const ScalarField& field, std::size_t k);

/// u11 u22 - u12^2 at the node nearest to point.
double hessian_determinant_fd(const ScalarField& field, const Vec2& point);

// Text format: "grid cartesian n1 n2 x1_lo x2_lo h1 h2 radius" or
// "grid polar n_r n_theta r_min radius", then one value per line.
void write_field(std::ostream& out, const ScalarField& field);
ScalarField read_field(std::istream& in);
void save_field(const std::string& path, const ScalarField& field);
ScalarField load_field(const std::string& path);
/// CSV with header x1,x2,u; undefined nodes are skipped.
void write_field_csv(std::ostream& out, const ScalarField& field);

}  // namespace malab
