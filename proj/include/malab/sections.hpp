#pragma once

#include "malab/errors.hpp"
#include "malab/field.hpp"
#include "malab/regime.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace malab {

/// Discrete section {u(x) < u(x0) + tilt.(x - x0) + t} as a convex polygon
/// (counter-clockwise).
struct SectionShape {
    Vec2 center = Vec2::Zero();
    double t = 0.0;
    Vec2 tilt = Vec2::Zero();
    std::vector<Vec2> polygon;
};

/// E = center + r A B_1 with det A = 1, A lower triangular, positive diagonal.
struct JohnFrame {
    Mat2 A = Mat2::Identity();
    double r = 0.0;
    double sandwich_constant = 0.0;  ///< smallest k with E subset shape subset k E (about the center)

    double norm_A() const;
    /// Ratio of the ellipse axes, ||A||^2.
    double eccentricity() const;
    /// Shape matrix M = r A O (symmetric positive definite), E = center + M B_1.
    Mat2 shape_matrix() const;
};

double polygon_area(const std::vector<Vec2>& polygon);
Vec2 polygon_centroid(const std::vector<Vec2>& polygon);
/// Second moment about the centroid divided by the area.
Mat2 polygon_covariance(const std::vector<Vec2>& polygon);
/// max over polygon vertices of (v - origin).e
double support(const std::vector<Vec2>& polygon, const Vec2& origin, const Vec2& e);
/// Convex hull, counter-clockwise, collinear points dropped.
std::vector<Vec2> convex_hull(std::vector<Vec2> points);

/// Gradient of the field at x: the anchored gradient when x is the origin
/// and the field carries one, otherwise 4th-order differences of sample().
Vec2 field_gradient(const ScalarField& field, const Vec2& x);

/// Marching-squares section with the supporting slope grad u(center).
/// Throws OutOfDomainError when the section reaches an undefined node.
SectionShape section(const ScalarField& field, const Vec2& center, double t);
/// Same with an explicit slope.
SectionShape section(const ScalarField& field, const Vec2& center, double t, const Vec2& tilt);

struct CenteredOptions {
    double damping = 0.5;
    int max_iterations = 200;
};

/// Section {u(x) < u(x0) + p.(x - x0) + t} whose centroid is x0. p is found
/// by a damped fixed point on the centroid started from grad u(x0) and
/// preconditioned by the section's second moment; stops when
/// |centroid - x0| < h/4.
SectionShape centered_section(const ScalarField& field, double t, const CenteredOptions& opts = {},
                              const Vec2& center = Vec2::Zero());

/// Maximal-area ellipse centered at shape.center and inscribed in the
/// polygon (log-barrier Newton in the 3 entries of M).
/// Throws DegeneracyError for polygons of (nearly) zero area or a center on
/// the boundary.
JohnFrame john_ellipse(const SectionShape& shape);

struct TraceEntry {
    double t = 0.0;
    SectionShape shape;
    JohnFrame frame;
};

struct EccentricityTrace {
    std::vector<TraceEntry> entries;
    std::vector<std::string> warnings;  ///< skipped or truncated t values
};

/// Frames of the sections at center for each t (sorted decreasingly).
/// Sections touching the domain are skipped, and the trace stops at the first
/// t whose section spans fewer than min_cells cells across its narrowest
/// direction; both are recorded as warnings.
EccentricityTrace eccentricity_trace(const ScalarField& field, std::vector<double> t_values,
                                     bool centered, double min_cells = 8.0,
                                     const Vec2& center = Vec2::Zero());

/// CSV columns t,a11,a21,a22,r,norm_A,sandwich_k.
void write_trace_csv(std::ostream& out, const EccentricityTrace& trace);

enum class Verdict { radial, non_radial, inconclusive };
std::string to_string(Verdict v);

struct ClassifierOptions {
    double e_max = 10.0;     ///< eccentricity (axis ratio) bound for Radial
    double slope_min = 0.05; ///< minimal growth slope counted as a trend
    double r2_min = 0.9;
    double decades = 1.0;    ///< slope fitted over the smallest `decades` of t
    double product_tol = 0.3;
};

/// Least-squares line through (log t, log eccentricity).
struct SlopeFit {
    double slope = 0.0;  ///< -d log(eccentricity) / d log t
    double r2 = 0.0;
    double t_lo = 0.0;
    double t_hi = 0.0;
    int points = 0;
};

SlopeFit eccentricity_slope(const EccentricityTrace& trace, double t_lo, double t_hi);

struct BehaviorReport {
    Verdict verdict = Verdict::inconclusive;
    // Radial: range of t/|x|^beta over the section boundaries.
    double c_fit = 0.0;
    double C_fit = 0.0;
    // Non-radial: u ~ a |x1|^{2+alpha}/((alpha+2)(alpha+1)) + x2^2/(2a) in
    // the frame of the smallest section.
    double a = 0.0;
    double a_from_long_axis = 0.0;
    double a_from_short_axis = 0.0;
    double product_check = 0.0;  ///< 2(2+alpha)(1+alpha) beta1 beta2, 1 for the model
    JohnFrame frame;
    SlopeFit slope_fit;
    double sup_eccentricity = 0.0;
    std::vector<std::pair<double, double>> trace;  ///< (t, ||A_t||)
    std::string diagnostics;
};

/// Radial when the eccentricity stays below e_max with no trend over the
/// last decades (|slope| < slope_min); NonRadial when the slope is at least
/// slope_min with R^2 >= r2_min and the product check holds within
/// product_tol; Inconclusive otherwise. Throws DomainError when the trace
/// spans less than 1.5 decades.
BehaviorReport classify_behavior(const EccentricityTrace& trace, const Regime& regime,
                                 const ClassifierOptions& opts = {});

std::string to_json(const BehaviorReport& report);

/// Integral of |x|^alpha over a polygon, by a fan of triangles from the
/// origin integrated in polar coordinates (the origin needs no special
/// cells). Requires alpha > -2.
double mu_measure(const std::vector<Vec2>& polygon, double alpha);
double mu_measure(const SectionShape& region, double alpha);

/// x0 + M B_1.
struct EllipseSpec {
    Vec2 center = Vec2::Zero();
    Mat2 M = Mat2::Identity();
};

/// Polygon with n vertices on the boundary of center + scale M B_1.
std::vector<Vec2> ellipse_polygon(const EllipseSpec& e, double scale = 1.0, int n = 4096);
/// Clips a convex polygon to another convex polygon (both counter-clockwise).
std::vector<Vec2> clip_convex(const std::vector<Vec2>& subject, const std::vector<Vec2>& clip);

struct DoublingReport {
    std::vector<double> ratios;  ///< mu(x0 + E) / mu((x0 + 2E) cap B_1)
    double infimum = 0.0;
};

DoublingReport doubling_check(double alpha, const std::vector<EllipseSpec>& family);

}  // namespace malab
