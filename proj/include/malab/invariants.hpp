#pragma once

#include "malab/errors.hpp"
#include "malab/field.hpp"
#include "malab/regime.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace malab {

/// Second derivatives at any point: the native stencil at grid nodes,
/// centred differences of sample() with step equal to the grid spacing
/// elsewhere.
Mat2 hessian_at(const ScalarField& field, const Vec2& point);

/// J_u = (Laplace u) (r^2 u_rr)^gamma with r^2 u_rr = x.D^2u x.
/// Throws DegeneracyError when r^2 u_rr <= 0 or the Laplacian is not positive.
double J_value(const ScalarField& field, const Vec2& point, const Regime& regime);
/// M_u = log J_u.
double M_value(const ScalarField& field, const Vec2& point, const Regime& regime);

/// v(x) = r^{-beta} u(r x) on target (default: the source grid). Target
/// nodes whose image leaves the defined region of the source are undefined.
/// Throws AccuracyError when the rescaled unit disc spans fewer than
/// min_cells source cells in radius.
ScalarField blowup(const ScalarField& field, double r, const Regime& regime,
                   std::optional<DiscGrid> target = std::nullopt, double min_cells = 8.0);

struct RingStats {
    double r = 0.0;
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;
    double stddev = 0.0;
    double oscillation() const { return max - min; }
};

struct JTrace {
    std::vector<std::pair<Vec2, double>> samples;
    double r_in = 0.0;
    double r_out = 0.0;
    std::vector<RingStats> rings;       ///< in the order of the requested radii
    std::optional<double> J_limit;      ///< extrapolated value at r = 0
    double fitted_order = 0.0;          ///< p in mean(r) ~ L + C r^p
    bool inconclusive = false;          ///< oscillation does not decrease inward
    std::string diagnostics;
};

/// Ring statistics of J and an extrapolation of the ring means to r = 0 by
/// fitting L + C r^p with p scanned over [0.25, 4]; when the means differ
/// by less than the within-ring scatter the innermost mean is used. Rings where J
/// cannot be evaluated are dropped with a diagnostic.
JTrace J_limit_estimate(const ScalarField& field, const Regime& regime, std::vector<double> radii,
                        int samples_per_ring = 256);

/// CSV columns r,J_mean,J_min,J_max.
void write_jtrace_csv(std::ostream& out, const JTrace& trace);
std::string to_json(const JTrace& trace);

struct InteriorMaxReport {
    Vec2 argmax = Vec2::Zero();
    double r_at_max = 0.0;
    double max_deviation = 0.0;  ///< max |J - J0| over the annulus
    double min_deviation = 0.0;
    bool on_boundary = false;    ///< argmax within one cell of either circle
    bool constant = false;       ///< max - min deviation below const_tol * J0
};

/// Samples |J - J0| on n_r circles (both boundary circles included) times
/// n_theta angles of the closed annulus r_in <= |x| <= r_out.
InteriorMaxReport interior_max_check(const ScalarField& field, const Regime& regime, double r_in,
                                     double r_out, int n_r = 41, int n_theta = 256,
                                     double const_tol = 1e-3);

}  // namespace malab
