#include "malab/homogeneous.hpp"

#include "malab/errors.hpp"

#include "quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace malab {

namespace {

constexpr double pi = std::numbers::pi;

double envelope_power(const Regime& r) { return 2.0 * (1.0 - 1.0 / r.beta); }

double envelope_const(const Regime& r) { return 1.0 / ((r.beta - 1.0) * (r.beta - 1.0)); }

// Abscissa of max h_c: c p t^{p-1} = 2 beta^2 t.
double envelope_peak(double c, const Regime& r)
{
    const double p = envelope_power(r);
    return std::pow(c * p / (2.0 * r.beta * r.beta), 1.0 / (2.0 - p));
}

// (2 h_c(t_minus + s^2) - 2 h_c(t_minus)) / s^2, evaluated without cancellation.
double lower_quotient(double s, const ProfileEnvelope& e)
{
    const double p = envelope_power(e.regime);
    const double b2 = e.regime.beta * e.regime.beta;
    const double tm = e.t_minus;
    const double s2 = s * s;
    if (s2 < 1e-300)
        return e.c * p * std::pow(tm, p - 1.0) - 2.0 * b2 * tm;
    return e.c * std::pow(tm, p) * std::expm1(p * std::log1p(s2 / tm)) / s2 - b2 * (2.0 * tm + s2);
}

// Same at the upper root with t = t_plus - s^2.
double upper_quotient(double s, const ProfileEnvelope& e)
{
    const double p = envelope_power(e.regime);
    const double b2 = e.regime.beta * e.regime.beta;
    const double tp = e.t_plus;
    const double s2 = s * s;
    if (s2 < 1e-300)
        return -e.c * p * std::pow(tp, p - 1.0) + 2.0 * b2 * tp;
    return e.c * std::pow(tp, p) * std::expm1(p * std::log1p(-s2 / tp)) / s2 + b2 * (2.0 * tp - s2);
}

// d theta / d s on either side, i.e. 2 s / sqrt(2 h_c).
double lower_rate(double s, const ProfileEnvelope& e)
{
    return 2.0 / std::sqrt(std::max(lower_quotient(s, e), 1e-300));
}

double upper_rate(double s, const ProfileEnvelope& e)
{
    return 2.0 / std::sqrt(std::max(upper_quotient(s, e), 1e-300));
}

using detail::Integral;

// Adaptive Gauss-Legendre on [a, b], split into geometric panels from `scale`
// so that widely separated root scales are each resolved.
template <class F>
Integral integrate_panels(F&& f, double a, double b, double scale, const QuadratureOptions& o)
{
    Integral out;
    if (!(b > a))
        return out;
    double lo = a;
    double hi = std::min(b, std::max(a + scale, a * 4.0));
    while (true) {
        const Integral piece = detail::adaptive_gauss(f, lo, hi, o.rel_tol, int(o.max_depth));
        out.value += piece.value;
        out.error += piece.error;
        if (hi >= b)
            break;
        lo = hi;
        hi = std::min(b, hi * 4.0);
    }
    return out;
}

// Increasing half of the profile: theta over [0, I_c] as two monotone branches
// glued at the peak of h_c.
struct HalfPeriod {
    ProfileEnvelope env;
    double s_lower = 0.0;    // sqrt(t_peak - t_minus)
    double s_upper = 0.0;    // sqrt(t_plus - t_peak)
    double theta_peak = 0.0;  // theta at which g = t_peak
    double half = 0.0;        // I_c
    double error = 0.0;
};

HalfPeriod half_period(const ProfileEnvelope& env, const QuadratureOptions& o)
{
    HalfPeriod hp;
    hp.env = env;
    const double peak = std::clamp(envelope_peak(env.c, env.regime), env.t_minus, env.t_plus);
    hp.s_lower = std::sqrt(peak - env.t_minus);
    hp.s_upper = std::sqrt(env.t_plus - peak);
    auto fl = [&](double s) { return lower_rate(s, env); };
    auto fu = [&](double s) { return upper_rate(s, env); };
    const Integral lo = integrate_panels(fl, 0.0, hp.s_lower, std::sqrt(env.t_minus), o);
    const Integral up = integrate_panels(fu, 0.0, hp.s_upper, std::sqrt(env.t_minus), o);
    hp.theta_peak = lo.value;
    hp.half = lo.value + up.value;
    hp.error = lo.error + up.error;
    return hp;
}

}  // namespace

double envelope_value(double t, double c, const Regime& regime)
{
    if (!(t > 0.0))
        throw DomainError("envelope_value needs t > 0");
    const double p = envelope_power(regime);
    return 0.5 * (c * std::pow(t, p) - regime.beta * regime.beta * t * t - envelope_const(regime));
}

double envelope_derivative(double t, double c, const Regime& regime)
{
    if (!(t > 0.0))
        throw DomainError("envelope_derivative needs t > 0");
    const double p = envelope_power(regime);
    return 0.5 * (c * p * std::pow(t, p - 1.0) - 2.0 * regime.beta * regime.beta * t);
}

Tangency tangency_c0(const Regime& regime)
{
    // f1 = c t^p and f2 = beta^2 t^2 + 1/(beta-1)^2 touch where
    // c (1 - 1/beta) t^{-2/beta} = beta^2, which forces t0 = c_alpha.
    const double b = regime.beta;
    Tangency tg;
    tg.t0 = regime.c_alpha;
    tg.c0 = b * b * std::pow(tg.t0, 2.0 / b) / (1.0 - 1.0 / b);
    return tg;
}

ProfileEnvelope make_envelope(double c, const Regime& regime)
{
    const Tangency tg = tangency_c0(regime);
    if (!(c > tg.c0) || !(envelope_value(tg.t0, c, regime) > 0.0))
        throw DomainError("h_c has an empty positivity set for c = " + std::to_string(c)
                          + " (c0 = " + std::to_string(tg.c0) + ")");
    auto h = [&](double t) { return envelope_value(t, c, regime); };

    // Returns the endpoint of the bracket on which h > 0.
    auto bisect = [&](double inner, double outer) {
        while (true) {
            const double mid = 0.5 * (inner + outer);
            if (mid == inner || mid == outer)
                return inner;
            (h(mid) > 0.0 ? inner : outer) = mid;
        }
    };

    ProfileEnvelope e;
    e.c = c;
    e.regime = regime;
    double lo = tg.t0;
    while (h(lo) > 0.0) {
        lo *= 0.5;
        if (lo < 1e-300)
            throw AccuracyError("lower root of h_c not bracketed", lo);
    }
    e.t_minus = bisect(tg.t0, lo);
    double hi = tg.t0;
    while (h(hi) > 0.0) {
        hi *= 2.0;
        if (hi > 1e300)
            throw AccuracyError("upper root of h_c not bracketed", hi);
    }
    e.t_plus = bisect(tg.t0, hi);
    return e;
}

double period_integral(double c, const Regime& regime, const QuadratureOptions& opts)
{
    const ProfileEnvelope env = make_envelope(c, regime);
    const HalfPeriod hp = half_period(env, opts);
    if (!std::isfinite(hp.half) || hp.error > 1e3 * opts.rel_tol * std::abs(hp.half))
        throw AccuracyError("period integral did not converge", hp.half);
    return hp.half;
}

ProfileSearch find_profile(int k, const Regime& regime, const SearchOptions& opts)
{
    if (k < 1)
        throw DomainError("find_profile needs k >= 1");
    ProfileSearch out;
    const double target = pi / k;
    const double c0 = tangency_c0(regime).c0;

    // For alpha = 0 every I_c equals pi/2 and there is no interior crossing.
    const double lx0 = std::log(opts.c_min_offset);
    const double lx1 = std::log(opts.c_max_factor - 1.0);
    auto I_at = [&](double lx) { return period_integral(c0 * (1.0 + std::exp(lx)), regime); };

    out.I_min = std::numeric_limits<double>::infinity();
    out.I_max = -out.I_min;
    double prev_lx = 0, prev_I = 0;
    for (int i = 0; i < opts.n_scan; ++i) {
        const double lx = lx0 + (lx1 - lx0) * i / (opts.n_scan - 1);
        const double I = I_at(lx);
        out.scan.emplace_back(c0 * (1.0 + std::exp(lx)), I);
        out.I_min = std::min(out.I_min, I);
        out.I_max = std::max(out.I_max, I);
        if (i > 0 && regime.alpha != 0.0 && (prev_I - target) * (I - target) <= 0.0) {
            double a = prev_lx, b = lx, fa = prev_I - target;
            for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
                const double m = 0.5 * (a + b);
                const double fm = I_at(m) - target;
                if (fm == 0.0) {
                    a = b = m;
                    break;
                }
                if ((fa < 0) == (fm < 0)) {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            out.roots.push_back(c0 * (1.0 + std::exp(0.5 * (a + b))));
        }
        prev_lx = lx;
        prev_I = I;
    }
    if (!out.roots.empty())
        out.c_star = out.roots.front();
    return out;
}

double HomogeneousProfile::g(double theta) const
{
    const std::size_t n = samples.size();
    if (n == 1)
        return samples[0].g;
    const double d = period / n;
    double t = std::fmod(theta, period);
    if (t < 0)
        t += period;
    std::size_t j = std::min(std::size_t(t / d), n - 1);
    const double s = (t - j * d) / d;
    const ProfileSample& a = samples[j];
    const ProfileSample& b = samples[(j + 1) % n];
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * a.g + (s3 - 2 * s2 + s) * d * a.dg + (-2 * s3 + 3 * s2) * b.g
         + (s3 - s2) * d * b.dg;
}

double HomogeneousProfile::dg(double theta) const
{
    const std::size_t n = samples.size();
    if (n == 1)
        return 0.0;
    const double d = period / n;
    double t = std::fmod(theta, period);
    if (t < 0)
        t += period;
    std::size_t j = std::min(std::size_t(t / d), n - 1);
    const double s = (t - j * d) / d;
    const ProfileSample& a = samples[j];
    const ProfileSample& b = samples[(j + 1) % n];
    const double s2 = s * s;
    return ((6 * s2 - 6 * s) * a.g + (6 * s - 6 * s2) * b.g) / d
         + (3 * s2 - 4 * s + 1) * a.dg + (3 * s2 - 2 * s) * b.dg;
}

double HomogeneousProfile::j_value() const
{
    const Regime& r = envelope.regime;
    return envelope.c * (1.0 - 1.0 / r.beta) * std::pow(r.beta * (r.beta - 1.0), r.gamma);
}

HomogeneousProfile reconstruct_profile(double c_star, int k, const Regime& regime, int n_samples)
{
    if (k < 1 || n_samples < 16)
        throw DomainError("reconstruct_profile needs k >= 1 and n_samples >= 16");
    const Tangency tg = tangency_c0(regime);
    HomogeneousProfile prof;
    prof.k = k;

    if (c_star <= tg.c0 * (1.0 + 1e-12)) {
        prof.envelope = {tg.c0, regime, regime.c_alpha, regime.c_alpha};
        prof.period = 2.0 * pi / k;
        prof.samples.assign(1, {0.0, regime.c_alpha, 0.0});
        prof.ode_residual_max = ode_residual(prof);
        return prof;
    }

    const ProfileEnvelope env = make_envelope(c_star, regime);
    const QuadratureOptions qo;
    const HalfPeriod hp = half_period(env, qo);
    prof.envelope = env;
    prof.period = 2.0 * hp.half;

    // Solves Theta(s) = target for s in [0, s_max] where Theta' = rate, walking
    // forward from (s_prev, theta_prev).
    auto invert = [&](auto&& rate, double target, double& s_prev, double& th_prev, double s_max) {
        double lo = s_prev, hi = s_max;
        double s = std::min(s_max, s_prev + (target - th_prev) / rate(s_prev));
        double th = th_prev;
        for (int it = 0; it < 100; ++it) {
            th = th_prev + detail::adaptive_gauss(rate, s_prev, s, qo.rel_tol, int(qo.max_depth)).value;
            const double f = th - target;
            if (std::abs(f) <= 4e-16 * std::max(1.0, target))
                break;
            (f < 0 ? lo : hi) = s;
            double next = s - f / rate(s);
            if (!(next > lo && next < hi))
                next = 0.5 * (lo + hi);
            if (next == s)
                break;
            s = next;
        }
        s_prev = s;
        th_prev = th;
        return s;
    };

    const int n = n_samples;
    const double d = prof.period / n;
    prof.samples.resize(n);
    double sl = 0.0, thl = 0.0;  // lower branch walker
    double su = 0.0, thu = 0.0;  // upper branch walker, measured from theta = I_c
    auto lr = [&](double s) { return lower_rate(s, env); };
    auto ur = [&](double s) { return upper_rate(s, env); };

    const int half_n = n / 2;
    // Upper-branch targets are visited in increasing distance from I_c.
    std::vector<int> upper_ids;
    for (int j = 0; j <= half_n; ++j) {
        const double th = j * d;
        ProfileSample& ps = prof.samples[j % n];
        ps.theta = th;
        if (th <= hp.theta_peak) {
            const double s = invert(lr, th, sl, thl, hp.s_lower);
            ps.g = env.t_minus + s * s;
            ps.dg = s * std::sqrt(std::max(lower_quotient(s, env), 0.0));
        } else {
            upper_ids.push_back(j);
        }
    }
    std::reverse(upper_ids.begin(), upper_ids.end());
    for (int j : upper_ids) {
        ProfileSample& ps = prof.samples[j];
        const double tau = std::max(0.0, hp.half - j * d);
        const double s = invert(ur, tau, su, thu, hp.s_upper);
        ps.g = env.t_plus - s * s;
        ps.dg = s * std::sqrt(std::max(upper_quotient(s, env), 0.0));
    }
    for (int j = half_n + 1; j < n; ++j) {
        prof.samples[j].theta = j * d;
        prof.samples[j].g = prof.samples[n - j].g;
        prof.samples[j].dg = -prof.samples[n - j].dg;
    }
    prof.ode_residual_max = ode_residual(prof);
    return prof;
}

double ode_residual(const HomogeneousProfile& prof)
{
    const Regime& r = prof.envelope.regime;
    const double b = r.beta;
    const auto& s = prof.samples;
    const int n = int(s.size());
    if (n < 5) {
        double worst = 0.0;
        for (const auto& p : s)
            worst = std::max(worst, std::abs(b * p.g * b * p.g - 1.0 / (b - 1.0)));
        return worst;
    }
    const double d = prof.period / n;
    double worst = 0.0;
    auto at = [&](int j) { return s[((j % n) + n) % n].g; };
    for (int j = 0; j < n; ++j) {
        const double g1 = (-at(j + 2) + 8 * at(j + 1) - 8 * at(j - 1) + at(j - 2)) / (12 * d);
        const double g2 = (-at(j + 2) + 16 * at(j + 1) - 30 * at(j) + 16 * at(j - 1) - at(j - 2))
                        / (12 * d * d);
        const double g = at(j);
        const double res = b * g * (g2 + b * g) - (b - 1) * g1 * g1 - 1.0 / (b - 1);
        worst = std::max(worst, std::abs(res));
    }
    return worst;
}

double homogeneous_value(const HomogeneousProfile& profile, const Vec2& x, double phase)
{
    const double r = x.norm();
    if (r == 0.0)
        return 0.0;
    const double th = std::atan2(x.y(), x.x());
    return std::pow(r, profile.envelope.regime.beta) * profile.g(th - phase);
}

ScalarField assemble_homogeneous(const HomogeneousProfile& profile, const DiscGrid& grid,
                                 double phase)
{
    ScalarField w = ScalarField::from_function(
        grid, [&](const Vec2& x) { return homogeneous_value(profile, x, phase); });
    w.gradient_origin = Vec2::Zero();
    return w;
}

}  // namespace malab
