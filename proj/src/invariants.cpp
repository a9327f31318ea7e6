#include "malab/invariants.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

namespace malab {

Mat2 hessian_at(const ScalarField& field, const Vec2& x)
{
    const DiscGrid& g = field.grid();
    const std::size_t k = g.nearest(x);
    if ((g.node(k) - x).norm() <= 1e-9 * g.spacing())
        return hessian_fd(field, k);
    const double h = g.kind() == GridKind::cartesian ? std::min(g.h1(), g.h2()) : g.dr();
    auto u = [&](double a, double b) { return field.sample(x + Vec2(a * h, b * h)); };
    const double c = u(0, 0);
    Mat2 H;
    H(0, 0) = (u(1, 0) - 2 * c + u(-1, 0)) / (h * h);
    H(1, 1) = (u(0, 1) - 2 * c + u(0, -1)) / (h * h);
    H(0, 1) = H(1, 0) = (u(1, 1) - u(1, -1) - u(-1, 1) + u(-1, -1)) / (4 * h * h);
    return H;
}

double J_value(const ScalarField& field, const Vec2& x, const Regime& regime)
{
    const Mat2 H = hessian_at(field, x);
    const double lap = H.trace();
    const double r2urr = x.dot(H * x);
    if (!(r2urr > 0.0) || !(lap > 0.0))
        throw DegeneracyError("J undefined at (" + std::to_string(x.x()) + ", " + std::to_string(x.y())
                              + "): r^2 u_rr = " + std::to_string(r2urr));
    return lap * std::pow(r2urr, regime.gamma);
}

double M_value(const ScalarField& field, const Vec2& x, const Regime& regime)
{
    return std::log(J_value(field, x, regime));
}

ScalarField blowup(const ScalarField& field, double r, const Regime& regime,
                   std::optional<DiscGrid> target, double min_cells)
{
    if (!(r > 0.0))
        throw DomainError("blow-up scale must be positive");
    const DiscGrid& src = field.grid();
    const DiscGrid tg = target ? *target : src;
    const double extent = tg.radius() > 0 ? tg.radius() : 1.0;
    if (r * extent / src.spacing() < min_cells)
        throw AccuracyError("source grid does not resolve the blow-up scale",
                            r * extent / src.spacing());
    const double scale = std::pow(r, -regime.beta);
    std::vector<double> v(tg.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t k = 0; k < tg.size(); ++k) {
        if (!tg.available(k))
            continue;
        if (const auto s = field.try_sample(r * tg.node(k)))
            v[k] = scale * *s;
    }
    ScalarField out(tg, std::move(v));
    if (field.gradient_origin)
        out.gradient_origin = *field.gradient_origin * (r * scale);
    return out;
}

JTrace J_limit_estimate(const ScalarField& field, const Regime& regime, std::vector<double> radii,
                        int samples_per_ring)
{
    if (radii.empty())
        throw DomainError("J_limit_estimate needs at least one ring");
    JTrace tr;
    std::ostringstream diag;
    for (double r : radii) {
        RingStats s;
        s.r = r;
        s.min = std::numeric_limits<double>::infinity();
        s.max = -s.min;
        double sum = 0, sum2 = 0;
        bool ok = true;
        std::vector<std::pair<Vec2, double>> ring;
        for (int m = 0; m < samples_per_ring && ok; ++m) {
            const double a = 2 * std::numbers::pi * m / samples_per_ring;
            const Vec2 x(r * std::cos(a), r * std::sin(a));
            try {
                const double J = J_value(field, x, regime);
                ring.emplace_back(x, J);
                sum += J;
                sum2 += J * J;
                s.min = std::min(s.min, J);
                s.max = std::max(s.max, J);
            } catch (const Error& e) {
                diag << "ring r = " << r << " dropped: " << e.what() << "; ";
                ok = false;
            }
        }
        if (!ok)
            continue;
        s.mean = sum / samples_per_ring;
        s.stddev = std::sqrt(std::max(sum2 / samples_per_ring - s.mean * s.mean, 0.0));
        tr.rings.push_back(s);
        tr.samples.insert(tr.samples.end(), ring.begin(), ring.end());
    }
    if (tr.rings.empty()) {
        tr.inconclusive = true;
        tr.diagnostics = diag.str() + "no ring could be evaluated";
        return tr;
    }
    auto by_r = tr.rings;
    std::sort(by_r.begin(), by_r.end(), [](const RingStats& a, const RingStats& b) { return a.r < b.r; });
    tr.r_in = by_r.front().r;
    tr.r_out = by_r.back().r;

    // Oscillation should shrink toward the origin.
    const double floor = 1e-8 * std::abs(by_r.front().mean);
    const double osc_in = by_r.front().oscillation(), osc_out = by_r.back().oscillation();
    tr.inconclusive = by_r.size() > 1 && osc_in > floor && osc_in >= osc_out;

    // mean(r) = L + C r^p; p scanned, (L, C) by least squares.
    // Ring means that differ by less than the within-ring scatter carry no
    // trend to extrapolate.
    double spread = 0, scatter = 0;
    for (const RingStats& s : by_r) {
        spread = std::max(spread, std::abs(s.mean - by_r.front().mean));
        scatter = std::max(scatter, s.stddev);
    }
    if (by_r.size() < 3 || spread <= std::max(scatter, 1e-10 * std::abs(by_r.front().mean))) {
        tr.J_limit = by_r.front().mean;
        tr.fitted_order = 0.0;
        diag << "no trend in the ring means (spread " << spread << ", scatter " << scatter
             << "); limit = innermost mean";
    } else {
        double best = std::numeric_limits<double>::infinity();
        for (int q = 25; q <= 400; ++q) {
            const double p = 0.01 * q;
            double s1 = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
            for (const RingStats& s : by_r) {
                const double x = std::pow(s.r, p);
                s1 += 1;
                sx += x;
                sy += s.mean;
                sxx += x * x;
                sxy += x * s.mean;
            }
            const double det = s1 * sxx - sx * sx;
            if (std::abs(det) < 1e-300)
                continue;
            const double C = (s1 * sxy - sx * sy) / det;
            const double L = (sy - C * sx) / s1;
            double res = 0;
            for (const RingStats& s : by_r)
                res += std::pow(L + C * std::pow(s.r, p) - s.mean, 2);
            if (res < best) {
                best = res;
                tr.J_limit = L;
                tr.fitted_order = p;
            }
        }
        diag << "fitted order " << tr.fitted_order << ", rms misfit " << std::sqrt(best / by_r.size());
    }
    tr.diagnostics = diag.str();
    return tr;
}

void write_jtrace_csv(std::ostream& out, const JTrace& tr)
{
    out << "r,J_mean,J_min,J_max\n";
    out.precision(12);
    for (const RingStats& s : tr.rings)
        out << s.r << ',' << s.mean << ',' << s.min << ',' << s.max << '\n';
}

std::string to_json(const JTrace& tr)
{
    using nlohmann::json;
    json j;
    j["r_in"] = tr.r_in;
    j["r_out"] = tr.r_out;
    j["J_limit"] = tr.J_limit ? json(*tr.J_limit) : json(nullptr);
    j["fitted_order"] = tr.fitted_order;
    j["inconclusive"] = tr.inconclusive;
    j["diagnostics"] = tr.diagnostics;
    j["rings"] = json::array();
    for (const RingStats& s : tr.rings)
        j["rings"].push_back({{"r", s.r}, {"mean", s.mean}, {"min", s.min}, {"max", s.max},
                              {"stddev", s.stddev}, {"oscillation", s.oscillation()}});
    return j.dump(2);
}

InteriorMaxReport interior_max_check(const ScalarField& field, const Regime& regime, double r_in,
                                     double r_out, int n_r, int n_theta, double const_tol)
{
    if (!(r_in > 0.0) || !(r_out > r_in) || n_r < 3 || n_theta < 4)
        throw DomainError("interior_max_check needs 0 < r_in < r_out and a sampling of at least 3 x 4");
    InteriorMaxReport rep;
    rep.max_deviation = -1.0;
    rep.min_deviation = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_r; ++i) {
        const double r = r_in + (r_out - r_in) * i / (n_r - 1);
        for (int m = 0; m < n_theta; ++m) {
            const double a = 2 * std::numbers::pi * m / n_theta;
            const Vec2 x(r * std::cos(a), r * std::sin(a));
            const double d = std::abs(J_value(field, x, regime) - regime.J0);
            if (d > rep.max_deviation) {
                rep.max_deviation = d;
                rep.argmax = x;
                rep.r_at_max = r;
            }
            rep.min_deviation = std::min(rep.min_deviation, d);
        }
    }
    const double cell = std::max(field.grid().spacing(), (r_out - r_in) / (n_r - 1));
    rep.on_boundary = rep.r_at_max - r_in <= cell * (1 + 1e-9) || r_out - rep.r_at_max <= cell * (1 + 1e-9);
    rep.constant = rep.max_deviation - rep.min_deviation <= const_tol * regime.J0;
    return rep;
}

}  // namespace malab
