#include "malab/experiments.hpp"

#include "sparse_solve.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace malab {

namespace {

constexpr double pi = std::numbers::pi;

double angle(const Vec2& x)
{
    return std::atan2(x.y(), x.x());
}

// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<std::pair<double, double>>& xy, double lo, double hi)
{
    double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [x, y] : xy) {
        if (x < lo * (1 - 1e-12) || x > hi * (1 + 1e-12) || !(y > 0.0))
            continue;
        const double lx = std::log(x), ly = std::log(y);
        n += 1;
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    if (n < 2)
        throw FitError("decay fit needs at least two radii");
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

struct PolarSolve {
    std::vector<double> r;
    std::vector<std::vector<double>> v;  // v[i][j]
};

// v_rr + (beta-1)(v_r/r + v_thth/r^2) = 0 on [r_in, 1] x [0, 2pi), centred
// differences, Dirichlet data on both circles.
PolarSolve solve_polar_linear(const Regime& regime, double r_in, int n_r, int n_th,
                              const std::function<double(double)>& inner)
{
    const double dr = (1.0 - r_in) / (n_r - 1), dth = 2 * pi / n_th;
    const double b1 = regime.beta - 1;
    PolarSolve out;
    out.r.resize(n_r);
    out.v.assign(n_r, std::vector<double>(n_th, 0.0));
    for (int i = 0; i < n_r; ++i)
        out.r[i] = r_in + i * dr;
    for (int j = 0; j < n_th; ++j) {
        out.v[0][j] = inner(j * dth);
        out.v[n_r - 1][j] = std::cos(2 * j * dth);
    }
    const int m = n_r - 2;
    auto id = [&](int i, int j) { return (i - 1) * n_th + ((j + n_th) % n_th); };
    detail::Triplets T;
    Eigen::VectorXd b = Eigen::VectorXd::Zero(m * n_th);
    for (int i = 1; i <= m; ++i) {
        const double r = out.r[i];
        const double cm = 1 / (dr * dr) - b1 / (2 * dr * r);
        const double cp = 1 / (dr * dr) + b1 / (2 * dr * r);
        const double ct = b1 / (dth * dth * r * r);
        for (int j = 0; j < n_th; ++j) {
            const int row = id(i, j);
            T.emplace_back(row, row, -2 / (dr * dr) - 2 * ct);
            T.emplace_back(row, id(i, j - 1), ct);
            T.emplace_back(row, id(i, j + 1), ct);
            if (i > 1)
                T.emplace_back(row, id(i - 1, j), cm);
            else
                b(row) -= cm * out.v[0][j];
            if (i < m)
                T.emplace_back(row, id(i + 1, j), cp);
            else
                b(row) -= cp * out.v[n_r - 1][j];
        }
    }
    detail::SparseMatrix A(m * n_th, m * n_th);
    A.setFromTriplets(T.begin(), T.end());
    const Eigen::VectorXd x = detail::sparse_solve(A, b);
    for (int i = 1; i <= m; ++i)
        for (int j = 0; j < n_th; ++j)
            out.v[i][j] = x(id(i, j));
    return out;
}

std::vector<std::pair<double, double>> cos2_amplitudes(const PolarSolve& s)
{
    std::vector<std::pair<double, double>> a;
    const int n_th = int(s.v.front().size());
    for (std::size_t i = 0; i < s.r.size(); ++i) {
        double c = 0;
        for (int j = 0; j < n_th; ++j)
            c += s.v[i][j] * std::cos(4 * pi * j / n_th);
        a.emplace_back(s.r[i], 2 * c / n_th);
    }
    return a;
}

std::vector<double> default_instability_ts()
{
    std::vector<double> ts;
    for (int i = 0; i <= 30; ++i)
        ts.push_back(0.1 * std::pow(10.0, -i / 10.0));
    return ts;
}

nlohmann::json vec_json(const Vec2& v)
{
    return nlohmann::json::array({v.x(), v.y()});
}

nlohmann::json opt_json(const std::optional<double>& v)
{
    return v && std::isfinite(*v) ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

nlohmann::json slope_json(const SlopeFit& s)
{
    return {{"slope", s.slope}, {"r2", s.r2}, {"t_lo", s.t_lo}, {"t_hi", s.t_hi}, {"points", s.points}};
}

}  // namespace

void ExperimentConfig::validate() const
{
    if (!(alpha > -2.0))
        throw DomainError("alpha must exceed -2");
    if (grid < 8)
        throw DomainError("grid needs at least 8 cells");
    switch (name) {
    case ExperimentName::instability:
        if (!(alpha > 0.0))
            throw DomainError("instability needs alpha > 0");
        if (!(epsilon >= 0.0))
            throw DomainError("instability needs epsilon >= 0");
        break;
    case ExperimentName::negative_alpha:
        if (!(alpha < 0.0))
            throw DomainError("negative_alpha needs -2 < alpha < 0");
        if (!(std::abs(perturbation) < 1.0))
            throw DomainError("boundary perturbation must stay below 1 in size");
        break;
    case ExperimentName::linearized:
        if (!(alpha > 0.0))
            throw DomainError("linearized needs alpha > 0");
        break;
    case ExperimentName::catalog:
        if (k_max < 1)
            throw DomainError("k_max must be at least 1");
        for (double a : alpha_list)
            if (!(a > -2.0))
                throw DomainError("catalog alphas must exceed -2");
        break;
    case ExperimentName::blowup:
        break;
    }
    for (const auto* list : {&t_values, &r_values})
        for (std::size_t i = 0; i < list->size(); ++i)
            if (!((*list)[i] > 0.0) || (i > 0 && !((*list)[i] < (*list)[i - 1])))
                throw DomainError("t and r lists must be positive and decreasing");
}

double rho_exponent(const Regime& regime)
{
    if (!(regime.alpha > 0.0))
        throw DomainError("rho_exponent needs alpha > 0");
    const double b = regime.beta;
    return (2 - b + std::sqrt(b * b + 12 * b - 12)) / 2;
}

double rho_rejected(const Regime& regime)
{
    if (!(regime.alpha > 0.0))
        throw DomainError("rho_rejected needs alpha > 0");
    const double b = regime.beta;
    return (2 - b - std::sqrt(b * b + 12 * b - 12)) / 2;
}

LinearizedReport run_linearized(const ExperimentConfig& config)
{
    ExperimentConfig c = config;
    c.name = ExperimentName::linearized;
    c.validate();
    const Regime reg = regime_from_alpha(c.alpha);
    LinearizedReport rep;
    rep.rho_closed_form = rho_exponent(reg);
    rep.rho_rejected = rho_rejected(reg);
    const double rho = rep.rho_closed_form;
    rep.quadratic_residual = std::abs(rho * (rho - 1) + (reg.beta - 1) * (rho - 4));
    rep.fit_lo = 0.1;
    rep.fit_hi = 0.9;
    const int n = c.grid;

    // Zero inner data on a small circle: the inward-growing mode is
    // suppressed by (r_in)^(rho - rho_rejected).
    rep.r_in = 0.01;
    const PolarSolve free = solve_polar_linear(reg, rep.r_in, n, n, [](double) { return 0.0; });
    rep.decay = cos2_amplitudes(free);
    rep.rho_fitted = loglog_slope(rep.decay, rep.fit_lo, rep.fit_hi);

    const double r_m = 0.05;
    const PolarSolve man = solve_polar_linear(reg, r_m, n, n,
                                              [&](double th) { return std::pow(r_m, rho) * std::cos(2 * th); });
    const int n_th = int(man.v.front().size());
    for (std::size_t i = 0; i < man.r.size(); ++i)
        for (int j = 0; j < n_th; ++j)
            rep.manufactured_error = std::max(
                rep.manufactured_error,
                std::abs(man.v[i][j] - std::pow(man.r[i], rho) * std::cos(4 * pi * j / n_th)));
    rep.rho_manufactured = loglog_slope(cos2_amplitudes(man), rep.fit_lo, rep.fit_hi);
    return rep;
}

Anchored anchor_at(const ScalarField& u, const Vec2& point)
{
    const DiscGrid& g = u.grid();
    const std::size_t k0 = g.nearest(point);
    if (!u.defined(k0))
        throw OutOfDomainError("anchor point is not a defined node");
    Anchored a{u, g.node(k0), Vec2::Zero(), u[k0]};
    ScalarField plain(g, std::vector<double>(u.values().begin(), u.values().end()));
    a.gradient = field_gradient(plain, a.point);
    std::vector<double> v(g.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t k = 0; k < g.size(); ++k)
        if (u.defined(k))
            v[k] = u[k] - a.value - a.gradient.dot(g.node(k) - a.point);
    a.field = ScalarField(g, std::move(v));
    if (a.point.norm() <= 1e-12 * g.spacing())
        a.field.gradient_origin = Vec2::Zero();
    return a;
}

Anchored anchor_at_minimum(const ScalarField& u)
{
    const DiscGrid& g = u.grid();
    std::size_t best = g.size();
    for (std::size_t k = 0; k < g.size(); ++k)
        if (u.defined(k) && (best == g.size() || u[k] < u[best]))
            best = k;
    if (best == g.size())
        throw DegeneracyError("field has no defined node");
    return anchor_at(u, g.node(best));
}

InstabilityReport run_instability(const ExperimentConfig& config)
{
    ExperimentConfig c = config;
    c.name = ExperimentName::instability;
    c.validate();
    const Regime reg = regime_from_alpha(c.alpha);
    InstabilityReport rep;
    rep.alpha = c.alpha;
    rep.epsilon = c.epsilon;
    rep.grid = c.grid;
    rep.slope_expected = c.alpha / (2 * (2 + c.alpha));

    const double eps = c.epsilon;
    DirichletProblem prob{PowerRhs{1.0, c.alpha},
                          [reg, eps](const Vec2& x) {
                              return reg.c_alpha * std::pow(x.norm(), reg.beta) - eps * std::cos(2 * angle(x));
                          },
                          DiscGrid::cartesian(c.grid, 1.0)};
    const ConvexSolution sol = solve(prob, c.solver);
    rep.iterations = sol.iterations;
    rep.residual_sup = sol.residual_sup;
    rep.convexity_margin = sol.convexity_margin;
    const ScalarField& u = sol.field;
    for (std::size_t k = 0; k < u.grid().size(); ++k)
        if (u.defined(k) && u.grid().node(k).norm() <= 1.0)
            rep.sup_deviation_from_u0 = std::max(
                rep.sup_deviation_from_u0,
                std::abs(u[k] - reg.c_alpha * std::pow(u.grid().node(k).norm(), reg.beta)));

    const Anchored an = anchor_at_minimum(u);
    rep.anchor = an.point;
    const std::vector<double> ts = c.t_values.empty() ? default_instability_ts() : c.t_values;
    rep.trace = eccentricity_trace(an.field, ts, false, 8.0, an.point);
    rep.warnings = rep.trace.warnings;
    rep.slope_reference = eccentricity_slope(rep.trace, 1e-3, 1e-1);
    try {
        rep.behavior = classify_behavior(rep.trace, reg);
    } catch (const DomainError& e) {
        rep.behavior.verdict = Verdict::inconclusive;
        rep.behavior.diagnostics = e.what();
    }
    try {
        rep.interior_max = interior_max_check(an.field, reg, 0.2, 0.6);
    } catch (const Error& e) {
        rep.warnings.push_back(std::string("interior max check: ") + e.what());
    }
    return rep;
}

NegativeAlphaReport run_negative_alpha(const ExperimentConfig& config)
{
    ExperimentConfig c = config;
    c.name = ExperimentName::negative_alpha;
    c.validate();
    const Regime reg = regime_from_alpha(c.alpha);
    NegativeAlphaReport rep;
    rep.alpha = c.alpha;
    rep.perturbation = c.perturbation;
    rep.grid = c.grid;

    const double p = c.perturbation;
    DirichletProblem prob{PowerRhs{1.0, c.alpha},
                          [reg, p](const Vec2& x) {
                              return reg.c_alpha * std::pow(x.norm(), reg.beta) * (1 + p * std::cos(angle(x)));
                          },
                          DiscGrid::cartesian(c.grid, 1.0)};
    const ConvexSolution sol = solve(prob, c.solver);
    rep.iterations = sol.iterations;
    rep.residual_sup = sol.residual_sup;
    rep.minimizer = anchor_at_minimum(sol.field).point;

    // The singular point is the origin whatever the boundary data; the
    // tangent plane there carries the first Fourier mode of the data.
    const Anchored an = anchor_at(sol.field, Vec2::Zero());
    rep.gradient_at_origin = an.gradient;
    const ScalarField& v = an.field;

    const double h = sol.field.grid().spacing();
    std::vector<double> radii = c.r_values;
    if (radii.empty())
        for (double r = 0.5; r >= 8 * h; r *= std::pow(10.0, -0.125))
            radii.push_back(r);
    const int n_th = 256;
    for (double r : radii) {
        RingRatio ring{r, 0.0, std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
        const double u0 = reg.c_alpha * std::pow(r, reg.beta);
        for (int j = 0; j < n_th; ++j) {
            const double a = 2 * pi * j / n_th;
            const double q = v.sample(Vec2(r * std::cos(a), r * std::sin(a))) / u0;
            ring.mean += q / n_th;
            ring.min = std::min(ring.min, q);
            ring.max = std::max(ring.max, q);
        }
        rep.rings.push_back(ring);
    }
    if (!rep.rings.empty()) {
        const RingRatio& in = rep.rings.back();
        rep.innermost_within_10_percent = in.min >= 0.9 && in.max <= 1.1;
        rep.monotone_last_decade = true;
        double prev = std::numeric_limits<double>::infinity();
        for (const RingRatio& ring : rep.rings) {
            if (ring.r > 10 * in.r * (1 + 1e-12))
                continue;
            const double dev = std::max(std::abs(ring.min - 1), std::abs(ring.max - 1));
            if (dev > prev * (1 + 1e-9))
                rep.monotone_last_decade = false;
            prev = dev;
        }
    }

    rep.centered_sections = c.alpha <= -1.0;
    std::vector<double> ts = c.t_values;
    // From the height of the radial section of radius 1/2 down, ten per
    // decade; the trace truncates where sections are no longer resolved.
    if (ts.empty())
        for (int i = 0; i <= 40; ++i)
            ts.push_back(reg.c_alpha * std::pow(0.5, reg.beta) * std::pow(10.0, -i / 10.0));
    rep.trace = eccentricity_trace(v, ts, rep.centered_sections, 8.0, Vec2::Zero());
    try {
        rep.behavior = classify_behavior(rep.trace, reg);
    } catch (const DomainError& e) {
        rep.behavior.verdict = Verdict::inconclusive;
        rep.behavior.diagnostics = e.what();
    }
    return rep;
}

std::vector<CatalogEntry> catalog_entries(const Regime& regime, int k_max)
{
    std::vector<CatalogEntry> out;
    const double c0 = tangency_c0(regime).c0;
    out.push_back({1, reconstruct_profile(c0, 1, regime)});
    if (regime.alpha <= 0.0)
        return out;
    for (int k = 2; k <= k_max; ++k) {
        // I_c lies strictly between pi/beta and pi/2.
        if (!(pi / k > pi / regime.beta && pi / k < pi / 2))
            continue;
        const ProfileSearch s = find_profile(k, regime);
        if (s.c_star)
            out.push_back({k, reconstruct_profile(*s.c_star, k, regime)});
    }
    return out;
}

double catalog_distance(const ScalarField& v, const HomogeneousProfile& w, double phase, int n_r,
                        int n_theta)
{
    double d = 0.0;
    for (int i = 0; i < n_r; ++i) {
        const double r = 0.5 + 0.5 * i / (n_r - 1);
        for (int j = 0; j < n_theta; ++j) {
            const double a = 2 * pi * j / n_theta;
            const Vec2 x(r * std::cos(a), r * std::sin(a));
            d = std::max(d, std::abs(v.sample(x) - homogeneous_value(w, x, phase)));
        }
    }
    return d;
}

BlowupReport run_blowup(const ScalarField& field, const ExperimentConfig& config)
{
    ExperimentConfig c = config;
    c.name = ExperimentName::blowup;
    c.validate();
    const Regime reg = regime_from_alpha(c.alpha);
    if (c.r_values.empty())
        throw DomainError("blowup needs a list of scales");
    BlowupReport rep;
    rep.alpha = c.alpha;

    ScalarField u = field;
    if (!u.gradient_origin && u.grid().kind() == GridKind::cartesian
        && u.grid().node(u.grid().nearest(Vec2::Zero())).norm() <= 1e-12)
        u = anchor_at(field, Vec2::Zero()).field;

    const auto entries = catalog_entries(reg, c.k_max);
    // A margin beyond the unit circle keeps the interpolation stencils defined.
    const DiscGrid target = DiscGrid::cartesian(256, 1.1);
    for (double r : c.r_values) {
        const ScalarField v = blowup(u, r, reg, target);
        BlowupStep best{r, std::numeric_limits<double>::infinity(), 1, 0.0};
        for (const CatalogEntry& e : entries) {
            if (e.profile.is_radial()) {
                const double d = catalog_distance(v, e.profile, 0.0);
                if (d < best.distance)
                    best = {r, d, e.k, 0.0};
                continue;
            }
            // Coarse scan, then golden section around the best sample.
            const double P = e.profile.period;
            const int n_scan = 32;
            double ph_best = 0.0, d_best = std::numeric_limits<double>::infinity();
            for (int i = 0; i < n_scan; ++i) {
                const double ph = P * i / n_scan;
                const double d = catalog_distance(v, e.profile, ph, 5, 128);
                if (d < d_best) {
                    d_best = d;
                    ph_best = ph;
                }
            }
            double a = ph_best - P / n_scan, b = ph_best + P / n_scan;
            const double gr = (std::sqrt(5.0) - 1) / 2;
            double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
            double f1 = catalog_distance(v, e.profile, x1), f2 = catalog_distance(v, e.profile, x2);
            for (int it = 0; it < 40 && b - a > 1e-10; ++it) {
                if (f1 < f2) {
                    b = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = b - gr * (b - a);
                    f1 = catalog_distance(v, e.profile, x1);
                } else {
                    a = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = a + gr * (b - a);
                    f2 = catalog_distance(v, e.profile, x2);
                }
            }
            const double ph = f1 < f2 ? x1 : x2;
            const double d = std::min(f1, f2);
            if (d < best.distance)
                best = {r, d, e.k, std::fmod(ph + P, P)};
        }
        rep.steps.push_back(best);
    }
    for (std::size_t i = 0; i + 1 < rep.steps.size(); ++i)
        rep.ratios.push_back(rep.steps[i].distance / rep.steps[i + 1].distance);
    return rep;
}

std::vector<CatalogRow> run_catalog(const ExperimentConfig& config)
{
    ExperimentConfig c = config;
    c.name = ExperimentName::catalog;
    c.validate();
    std::vector<CatalogRow> rows;
    for (double alpha : c.alpha_list) {
        const Regime reg = regime_from_alpha(alpha);
        const Tangency tg = tangency_c0(reg);

        CatalogRow radial;
        radial.alpha = alpha;
        radial.beta = reg.beta;
        radial.k = 1;
        radial.exists = true;
        radial.c_star = tg.c0;
        radial.t_minus = tg.t0;
        radial.t_plus = tg.t0;
        radial.ode_residual_max = reconstruct_profile(tg.c0, 1, reg).ode_residual_max;
        radial.note = "radial solution c_alpha r^beta";
        rows.push_back(radial);
        if (alpha < 0.0)
            continue;

        for (int k = 2; k <= c.k_max; ++k) {
            CatalogRow row;
            row.alpha = alpha;
            row.beta = reg.beta;
            row.k = k;
            if (alpha == 0.0) {
                row.I_c = pi / 2;
                row.note = k == 2 ? "I_c = pi/2 for every c > c0, no interior root; quadratic solutions exist classically"
                                  : "I_c = pi/2 for every c > c0";
                rows.push_back(row);
                continue;
            }
            if (!(pi / k > pi / reg.beta && pi / k < pi / 2)) {
                row.note = "pi/k outside (pi/beta, pi/2)";
                rows.push_back(row);
                continue;
            }
            const ProfileSearch s = find_profile(k, reg);
            if (!s.c_star) {
                std::ostringstream n;
                n << "no root on the scan; I_c in [" << s.I_min << ", " << s.I_max << "]";
                row.note = n.str();
                rows.push_back(row);
                continue;
            }
            const HomogeneousProfile prof = reconstruct_profile(*s.c_star, k, reg);
            row.exists = true;
            row.c_star = s.c_star;
            row.I_c = period_integral(*s.c_star, reg);
            row.t_minus = prof.envelope.t_minus;
            row.t_plus = prof.envelope.t_plus;
            row.ode_residual_max = prof.ode_residual_max;
            if (s.roots.size() > 1) {
                std::ostringstream n;
                n.precision(12);
                n << "roots:";
                for (double r : s.roots)
                    n << ' ' << r;
                row.note = n.str();
            }
            rows.push_back(row);
        }
    }
    return rows;
}

void write_catalog_csv(std::ostream& out, const std::vector<CatalogRow>& rows)
{
    auto opt = [&](const std::optional<double>& v) {
        if (v)
            out << *v;
    };
    out << "alpha,beta,k,exists,c_star,I_c,t_minus,t_plus,ode_residual_max,note\n";
    out.precision(15);
    for (const CatalogRow& r : rows) {
        out << r.alpha << ',' << r.beta << ',' << r.k << ',' << (r.exists ? "true" : "false") << ',';
        opt(r.c_star);
        out << ',';
        opt(r.I_c);
        out << ',';
        opt(r.t_minus);
        out << ',';
        opt(r.t_plus);
        out << ',';
        opt(r.ode_residual_max);
        out << ",\"" << r.note << "\"\n";
    }
}

std::string to_json(const LinearizedReport& r)
{
    nlohmann::json j;
    j["rho_closed_form"] = r.rho_closed_form;
    j["rho_rejected"] = r.rho_rejected;
    j["quadratic_residual"] = r.quadratic_residual;
    j["rho_fitted"] = r.rho_fitted;
    j["rho_manufactured"] = r.rho_manufactured;
    j["manufactured_error"] = r.manufactured_error;
    j["r_in"] = r.r_in;
    j["fit_range"] = {r.fit_lo, r.fit_hi};
    j["decay"] = nlohmann::json::array();
    for (const auto& [rr, a] : r.decay)
        j["decay"].push_back({rr, a});
    return j.dump(2);
}

std::string to_json(const InstabilityReport& r)
{
    nlohmann::json j;
    j["alpha"] = r.alpha;
    j["epsilon"] = r.epsilon;
    j["grid"] = r.grid;
    j["iterations"] = r.iterations;
    j["residual_sup"] = r.residual_sup;
    j["convexity_margin"] = r.convexity_margin;
    j["sup_deviation_from_u0"] = r.sup_deviation_from_u0;
    j["anchor"] = vec_json(r.anchor);
    j["behavior"] = nlohmann::json::parse(to_json(r.behavior));
    j["slope_expected"] = r.slope_expected;
    j["slope_reference"] = slope_json(r.slope_reference);
    j["interior_max"] = {{"argmax", vec_json(r.interior_max.argmax)},
                         {"r_at_max", r.interior_max.r_at_max},
                         {"max_deviation", r.interior_max.max_deviation},
                         {"min_deviation", r.interior_max.min_deviation},
                         {"on_boundary", r.interior_max.on_boundary},
                         {"constant", r.interior_max.constant}};
    j["warnings"] = r.warnings;
    return j.dump(2);
}

std::string to_json(const NegativeAlphaReport& r)
{
    nlohmann::json j;
    j["alpha"] = r.alpha;
    j["perturbation"] = r.perturbation;
    j["grid"] = r.grid;
    j["iterations"] = r.iterations;
    j["residual_sup"] = r.residual_sup;
    j["gradient_at_origin"] = vec_json(r.gradient_at_origin);
    j["minimizer"] = vec_json(r.minimizer);
    j["rings"] = nlohmann::json::array();
    for (const RingRatio& q : r.rings)
        j["rings"].push_back({{"r", q.r}, {"mean", q.mean}, {"min", q.min}, {"max", q.max}});
    j["innermost_within_10_percent"] = r.innermost_within_10_percent;
    j["monotone_last_decade"] = r.monotone_last_decade;
    j["centered_sections"] = r.centered_sections;
    j["behavior"] = nlohmann::json::parse(to_json(r.behavior));
    j["warnings"] = r.trace.warnings;
    return j.dump(2);
}

std::string to_json(const BlowupReport& r)
{
    nlohmann::json j;
    j["alpha"] = r.alpha;
    j["steps"] = nlohmann::json::array();
    for (const BlowupStep& s : r.steps)
        j["steps"].push_back({{"r", s.r}, {"distance", s.distance}, {"k", s.k}, {"phase", s.phase}});
    j["ratios"] = r.ratios;
    return j.dump(2);
}

std::string to_json(const std::vector<CatalogRow>& rows)
{
    nlohmann::json j = nlohmann::json::array();
    for (const CatalogRow& r : rows)
        j.push_back({{"alpha", r.alpha},
                     {"beta", r.beta},
                     {"k", r.k},
                     {"exists", r.exists},
                     {"c_star", opt_json(r.c_star)},
                     {"I_c", opt_json(r.I_c)},
                     {"t_minus", opt_json(r.t_minus)},
                     {"t_plus", opt_json(r.t_plus)},
                     {"ode_residual_max", opt_json(r.ode_residual_max)},
                     {"note", r.note}});
    return j.dump(2);
}

}  // namespace malab
