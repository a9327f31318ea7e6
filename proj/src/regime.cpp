#include "malab/regime.hpp"

#include "malab/errors.hpp"

#include <cmath>
#include <string>

namespace malab {

Regime regime_from_alpha(double alpha)
{
    if (!(alpha > -2.0) || !std::isfinite(alpha))
        throw DomainError("alpha must be > -2, got " + std::to_string(alpha));

    Regime r;
    r.alpha = alpha;
    r.beta = 2.0 + alpha / 2.0;
    r.gamma = 2.0 / r.beta - 1.0;
    r.c_alpha = 1.0 / (r.beta * std::sqrt(r.beta - 1.0));
    r.J0 = r.c_alpha * r.beta * r.beta
         * std::pow(r.c_alpha * r.beta * (r.beta - 1.0), r.gamma);
    return r;
}

}  // namespace malab
