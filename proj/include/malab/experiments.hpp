#pragma once

#include "malab/field.hpp"
#include "malab/homogeneous.hpp"
#include "malab/invariants.hpp"
#include "malab/masolver.hpp"
#include "malab/regime.hpp"
#include "malab/sections.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace malab {

enum class ExperimentName { instability, negative_alpha, blowup, catalog, linearized };

struct ExperimentConfig {
    ExperimentName name = ExperimentName::instability;
    double alpha = 2.0;
    double epsilon = 0.05;           ///< instability: boundary u0 - eps cos 2theta
    double perturbation = 0.2;       ///< negative_alpha: boundary u0 (1 + p cos theta)
    int grid = 512;                  ///< cells across the disc (polar: rings and spokes)
    std::vector<double> t_values;    ///< section heights; empty = default per experiment
    std::vector<double> r_values;    ///< blow-up scales / ring radii; empty = default
    std::vector<double> alpha_list;  ///< catalog
    int k_max = 6;                   ///< catalog
    std::string input;               ///< blowup: field file
    SolverOptions solver;

    /// Throws DomainError when the parameters do not fit the named experiment.
    void validate() const;
};

/// Decaying exponent of the cos 2theta mode of v_rr + (beta-1)(v_r/r + v_thth/r^2) = 0.
/// Throws DomainError for alpha <= 0.
double rho_exponent(const Regime& regime);
/// The other root of rho(rho-1) + (beta-1)(rho-4) = 0 (negative: grows inward).
double rho_rejected(const Regime& regime);

struct LinearizedReport {
    double rho_closed_form = 0.0;
    double rho_rejected = 0.0;
    double quadratic_residual = 0.0;
    /// Solve with zero data on a small inner circle: independent of the closed form.
    double rho_fitted = 0.0;
    /// Solve with the separated mode r_in^rho cos 2theta as inner data.
    double rho_manufactured = 0.0;
    double manufactured_error = 0.0;  ///< sup |v - r^rho cos 2theta|
    double r_in = 0.0;
    double fit_lo = 0.0;
    double fit_hi = 0.0;
    std::vector<std::pair<double, double>> decay;  ///< (r, cos 2theta amplitude), zero inner data
};

/// Polar 2D solve of the linearized equation on [r_in, 1] (grid x grid
/// nodes) with v = cos 2theta on the outer circle, then a log-log fit of the
/// cos 2theta amplitude over r in [0.1, 0.9].
LinearizedReport run_linearized(const ExperimentConfig& config);

/// u - u(x_m) - grad u(x_m).(x - x_m) at the node x_m minimizing u.
struct Anchored {
    ScalarField field;
    Vec2 point = Vec2::Zero();
    Vec2 gradient = Vec2::Zero();
    double value = 0.0;
};
Anchored anchor_at_minimum(const ScalarField& u);
/// Same, anchored at a given node-aligned point (the origin by default).
Anchored anchor_at(const ScalarField& u, const Vec2& point = Vec2::Zero());

struct InstabilityReport {
    double alpha = 0.0;
    double epsilon = 0.0;
    int grid = 0;
    int iterations = 0;
    double residual_sup = 0.0;
    double convexity_margin = 0.0;
    double sup_deviation_from_u0 = 0.0;
    Vec2 anchor = Vec2::Zero();
    BehaviorReport behavior;
    double slope_expected = 0.0;     ///< alpha / (2 (2 + alpha))
    SlopeFit slope_reference;        ///< over t in [1e-3, 1e-1]
    InteriorMaxReport interior_max;
    EccentricityTrace trace;
    std::vector<std::string> warnings;
};

/// Solves det D^2u = |x|^alpha with u = u0 - eps cos 2theta, anchors at the
/// minimum, traces section eccentricities (default t: 1e-1 down to 1e-4,
/// ten per decade, truncated where unresolved) and classifies, and locates
/// the maximum of |J - J0| on the annulus [0.2, 0.6].
InstabilityReport run_instability(const ExperimentConfig& config);

struct RingRatio {
    double r = 0.0;
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;
};

struct NegativeAlphaReport {
    double alpha = 0.0;
    double perturbation = 0.0;
    int grid = 0;
    int iterations = 0;
    double residual_sup = 0.0;
    Vec2 gradient_at_origin = Vec2::Zero();
    Vec2 minimizer = Vec2::Zero();
    std::vector<RingRatio> rings;  ///< outer to inner
    bool innermost_within_10_percent = false;
    bool monotone_last_decade = false;  ///< max |ratio - 1| per ring decreases inward
    bool centered_sections = false;
    BehaviorReport behavior;
    EccentricityTrace trace;
};

/// Solves with boundary u0 (1 + p cos theta), anchors at the origin (the
/// singular point) and reports ring-wise u/u0 and the sections verdict
/// (centered sections for alpha <= -1). Default rings: 0.5 down to 8 cells,
/// eight per decade; default t: from c_alpha 2^-beta down, ten per decade.
NegativeAlphaReport run_negative_alpha(const ExperimentConfig& config);

/// A homogeneous solution available for matching.
struct CatalogEntry {
    int k = 1;  ///< 1: radial
    HomogeneousProfile profile;
};
std::vector<CatalogEntry> catalog_entries(const Regime& regime, int k_max = 8);

struct BlowupStep {
    double r = 0.0;
    double distance = 0.0;  ///< sup over 1/2 <= |x| <= 1 of |v - w|
    int k = 1;              ///< best catalog entry
    double phase = 0.0;
};

struct BlowupReport {
    double alpha = 0.0;
    std::vector<BlowupStep> steps;
    std::vector<double> ratios;  ///< distance(r_i) / distance(r_{i+1})
};

/// Sup distance on the annulus between r^{-beta} u(r x) and a homogeneous
/// solution rotated by phase, sampled on n_r x n_theta points.
double catalog_distance(const ScalarField& v, const HomogeneousProfile& w, double phase,
                        int n_r = 9, int n_theta = 256);

/// Blow-ups of an anchored field at each r (decreasing) matched against the
/// catalog; the phase is optimized by a coarse scan and golden-section search.
BlowupReport run_blowup(const ScalarField& field, const ExperimentConfig& config);

struct CatalogRow {
    double alpha = 0.0;
    double beta = 0.0;
    int k = 1;
    bool exists = false;
    std::optional<double> c_star;
    std::optional<double> I_c;
    std::optional<double> t_minus;
    std::optional<double> t_plus;
    std::optional<double> ode_residual_max;
    std::string note;
};

/// Homogeneous solutions per alpha and k = 1..k_max. alpha < 0 rows list the
/// radial solution only; alpha = 0 is reported through its closed form.
std::vector<CatalogRow> run_catalog(const ExperimentConfig& config);

void write_catalog_csv(std::ostream& out, const std::vector<CatalogRow>& rows);

std::string to_json(const LinearizedReport& r);
std::string to_json(const InstabilityReport& r);
std::string to_json(const NegativeAlphaReport& r);
std::string to_json(const BlowupReport& r);
std::string to_json(const std::vector<CatalogRow>& rows);

}  // namespace malab
