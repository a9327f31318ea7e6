#pragma once

#include "malab/field.hpp"
#include "malab/regime.hpp"

#include <optional>
#include <vector>

namespace malab {

/// h_c(t) = (c t^{2(1-1/beta)} - beta^2 t^2 - 1/(beta-1)^2) / 2.
///
/// Along an arc where the angular profile g is increasing, g' = sqrt(2 h_c(g)).
/// Throws DomainError for t <= 0.
double envelope_value(double t, double c, const Regime& regime);

/// d h_c / dt.
double envelope_derivative(double t, double c, const Regime& regime);

struct Tangency {
    double c0 = 0.0;  ///< smallest c with a nonempty window {h_c > 0}
    double t0 = 0.0;  ///< tangency point; equals c_alpha
};

Tangency tangency_c0(const Regime& regime);

/// The positivity window (t_minus, t_plus) of h_c for a fixed c > c0.
struct ProfileEnvelope {
    double c = 0.0;
    Regime regime;
    double t_minus = 0.0;
    double t_plus = 0.0;
};

/// Brackets both roots of h_c outward from c_alpha and bisects them to full
/// precision. Throws DomainError for c <= c0.
ProfileEnvelope make_envelope(double c, const Regime& regime);

struct QuadratureOptions {
    double rel_tol = 1e-13;
    unsigned max_depth = 30;
};

/// I_c = integral over {h_c > 0} of dt / sqrt(2 h_c(t)): half the angular
/// period of the profile. Both endpoints are square-root singular and are
/// removed by t = t_minus + s^2 and t = t_plus - s^2.
///
/// Throws DomainError for c <= c0 and AccuracyError if the quadrature error
/// estimate exceeds 1e3 * rel_tol.
double period_integral(double c, const Regime& regime, const QuadratureOptions& opts = {});

struct SearchOptions {
    double c_max_factor = 1e6;    ///< scan c in (c0, c0 * c_max_factor]
    double c_min_offset = 1e-6;   ///< first scanned c is c0 * (1 + c_min_offset)
    int n_scan = 160;             ///< log-spaced scan points
};

struct ProfileSearch {
    std::optional<double> c_star;  ///< smallest root of I_c = pi/k
    std::vector<double> roots;     ///< every bracketed root, ascending
    double I_min = 0.0;            ///< observed range of I_c on the scan
    double I_max = 0.0;
    std::vector<std::pair<double, double>> scan;  ///< (c, I_c) samples
};

/// Looks for c > c0 with I_c = pi/k by scanning a log grid for sign changes
/// and bisecting every bracket. Monotonicity of I_c is not assumed.
ProfileSearch find_profile(int k, const Regime& regime, const SearchOptions& opts = {});

struct ProfileSample {
    double theta = 0.0;
    double g = 0.0;
    double dg = 0.0;
};

/// One principal period of g, starting at its minimum (theta = 0, g = t_minus).
class HomogeneousProfile {
public:
    ProfileEnvelope envelope;
    int k = 1;
    double period = 0.0;                 ///< 2 I_c; k * period = 2 pi for a global profile
    std::vector<ProfileSample> samples;  ///< uniform in theta over [0, period)
    double ode_residual_max = 0.0;       ///< sup over samples, from differenced samples

    bool is_radial() const noexcept { return envelope.t_plus <= envelope.t_minus; }
    /// g and g' at any angle (periodic cubic Hermite between samples).
    double g(double theta) const;
    double dg(double theta) const;
    /// Constant value of the J-invariant on r^beta g(theta).
    double j_value() const;
};

/// Samples g by inverting theta(g) = integral_{t_minus}^{g} dt / sqrt(2 h_c)
/// on the increasing half period and reflecting. c_star == c0 gives the
/// constant (radial) profile g = c_alpha.
HomogeneousProfile reconstruct_profile(double c_star, int k, const Regime& regime,
                                       int n_samples = 2048);

/// w(r, theta) = r^beta g(theta - phase).
ScalarField assemble_homogeneous(const HomogeneousProfile& profile, const DiscGrid& grid,
                                 double phase = 0.0);

/// Evaluates r^beta g(theta - phase) at a point.
double homogeneous_value(const HomogeneousProfile& profile, const Vec2& x, double phase = 0.0);

/// sup over samples of |beta g (g'' + beta g) - (beta-1) g'^2 - 1/(beta-1)|,
/// with g', g'' from 4th-order periodic differences of the g samples.
double ode_residual(const HomogeneousProfile& profile);

}  // namespace malab
