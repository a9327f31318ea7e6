#pragma once

#include "malab/field.hpp"
#include "malab/masolver.hpp"

#include <vector>

namespace malab {

/// u*(y1, y2) = x2 u_x2(x) - u(x) with y1 = x1, y2 = u_x2(x).
struct PartialLegendrePair {
    ScalarField primal;
    ScalarField dual;         ///< resampled on a box grid in (y1, y2); NaN off the image
    std::vector<Vec2> image;  ///< y(x) for every primal node; NaN where undefined
};

/// Partial Legendre transform in the second variable.
///
/// Along each column of constant x1 the defined nodes must form one
/// contiguous run on which u is strictly convex in x2. u_x2 and u_x2x2 come
/// from 6th-order differences; u* is then known at the scattered points
/// y2 = u_x2 together with du*/dy2 = x2 and d2u*/dy2^2 = 1/u_x2x2, and is
/// resampled by quintic Hermite interpolation. The dual grid keeps the x1
/// columns and spans the bounding box of the image in y2 with as many rows
/// as the primal grid.
///
/// Throws DegeneracyError naming the column when a slice is not strictly
/// convex (or too short), DomainError for polar grids.
PartialLegendrePair partial_legendre(const ScalarField& field);

/// Same transform resampled onto a caller-chosen box or disc grid whose
/// columns coincide with the x1 columns of field.
PartialLegendrePair partial_legendre(const ScalarField& field, const DiscGrid& target);

/// Solves w_11 + c |y1|^alpha w_22 = 0 in the disc of grid with w = boundary
/// on the circle. Five-point scheme, arms cut at the circle, and |y1|^alpha
/// replaced by its exact average over [y1 - h/2, y1 + h/2]. Nodes outside the
/// disc carry the boundary value at their radial projection.
ScalarField solve_degenerate_linear(double alpha, double c, const BoundaryFn& boundary,
                                    const DiscGrid& grid);

struct ExpansionOptions {
    double rho_min = 1.0 / 64;
    double rho_max = 0.25;
    /// Windows whose fit residual is below noise_floor * max|w| are treated
    /// as exact and left out of the exponent fit.
    double noise_floor = 1e-11;
    int min_nodes = 12;
};

struct WindowFit {
    double rho = 0.0;
    int nodes = 0;
    double max_residual = 0.0;
    double coefficients[5] = {};  ///< a0, a1.x, a1.y, a2, a3
    bool at_noise_floor = false;
};

/// w ~ a0 + a1.y + a2 y1 y2 + a3 (y2^2/2 - |y1|^{2+alpha}/((alpha+2)(alpha+1)))
/// fitted by least squares on the windows {|y1|^{2+alpha} + y2^2 < rho^2},
/// rho dyadic in [rho_min, rho_max]. Coefficients are those of the smallest
/// window; remainder_exponent is the slope of log(max residual) against
/// log(rho^2) over windows above the noise floor (infinity if fewer than two).
struct ExpansionReport {
    double a0 = 0.0;
    Vec2 a1 = Vec2::Zero();
    double a2 = 0.0;
    double a3 = 0.0;
    double remainder_exponent = 0.0;
    double rho_min = 0.0;
    double rho_max = 0.0;
    std::vector<WindowFit> windows;
};

/// Throws FitError if a window is too small or its design matrix is rank
/// deficient.
ExpansionReport expansion_coefficients(const ScalarField& field, double alpha,
                                       const ExpansionOptions& opts = {});

/// JSON text of the report; a non-finite exponent is written as null.
std::string to_json(const ExpansionReport& report);

}  // namespace malab
