#pragma once

namespace malab {

/// Constants derived from the exponent of det D^2 u = |x|^alpha.
///
/// beta is the homogeneity degree of the radial solution c_alpha |x|^beta,
/// gamma the exponent in the J-invariant and J0 its value on the radial
/// solution.
struct Regime {
    double alpha = 0.0;
    double beta = 2.0;
    double gamma = 0.0;
    double c_alpha = 0.5;
    double J0 = 2.0;
};

/// Throws DomainError unless alpha > -2.
Regime regime_from_alpha(double alpha);

}  // namespace malab
