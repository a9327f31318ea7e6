#include "malab/sections.hpp"

#include "quadrature.hpp"

#include "json.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

namespace malab {

namespace {

double cross(const Vec2& a, const Vec2& b)
{
    return a.x() * b.y() - a.y() * b.x();
}

}  // namespace

double polygon_area(const std::vector<Vec2>& p)
{
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
        s += cross(p[i], p[(i + 1) % p.size()]);
    return 0.5 * s;
}

Vec2 polygon_centroid(const std::vector<Vec2>& p)
{
    Vec2 c = Vec2::Zero();
    double a = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const Vec2& u = p[i];
        const Vec2& v = p[(i + 1) % p.size()];
        const double w = cross(u, v);
        a += w;
        c += w * (u + v);
    }
    if (a == 0.0)
        throw DegeneracyError("centroid of a polygon with zero area");
    return c / (3.0 * a);
}

Mat2 polygon_covariance(const std::vector<Vec2>& p)
{
    const Vec2 c = polygon_centroid(p);
    double sxx = 0, syy = 0, sxy = 0, a = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const Vec2 u = p[i] - c;
        const Vec2 v = p[(i + 1) % p.size()] - c;
        const double w = cross(u, v);
        a += 0.5 * w;
        sxx += w * (u.x() * u.x() + u.x() * v.x() + v.x() * v.x()) / 12.0;
        syy += w * (u.y() * u.y() + u.y() * v.y() + v.y() * v.y()) / 12.0;
        sxy += w * (2 * u.x() * u.y() + u.x() * v.y() + v.x() * u.y() + 2 * v.x() * v.y()) / 24.0;
    }
    Mat2 S;
    S << sxx, sxy, sxy, syy;
    return S / a;
}

double support(const std::vector<Vec2>& p, const Vec2& origin, const Vec2& e)
{
    double s = -std::numeric_limits<double>::infinity();
    for (const Vec2& v : p)
        s = std::max(s, (v - origin).dot(e));
    return s;
}

std::vector<Vec2> convex_hull(std::vector<Vec2> pts)
{
    std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
        return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3)
        return pts;
    std::vector<Vec2> h(2 * pts.size());
    std::size_t k = 0;
    for (const Vec2& p : pts) {
        while (k >= 2 && cross(h[k - 1] - h[k - 2], p - h[k - 2]) <= 0)
            --k;
        h[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, lo = k + 1; i-- > 0;) {
        while (k >= lo && cross(h[k - 1] - h[k - 2], pts[i] - h[k - 2]) <= 0)
            --k;
        h[k++] = pts[i];
    }
    h.resize(k - 1);
    return h;
}

Vec2 field_gradient(const ScalarField& field, const Vec2& x)
{
    if (field.gradient_origin && x.norm() == 0.0)
        return *field.gradient_origin;
    const double h = field.grid().spacing();
    auto d = [&](const Vec2& e) {
        return (-field.sample(x + 2 * h * e) + 8 * field.sample(x + h * e) - 8 * field.sample(x - h * e)
                + field.sample(x - 2 * h * e))
             / (12 * h);
    };
    return Vec2(d(Vec2(1, 0)), d(Vec2(0, 1)));
}

SectionShape section(const ScalarField& field, const Vec2& center, double t)
{
    return section(field, center, t, field_gradient(field, center));
}

SectionShape section(const ScalarField& field, const Vec2& center, double t, const Vec2& tilt)
{
    const DiscGrid& g = field.grid();
    if (g.kind() != GridKind::cartesian)
        throw DomainError("sections need a cartesian grid");
    if (!(t > 0.0))
        throw DomainError("section height must be positive");
    const double base = field.sample(center);
    const int n1 = g.n1(), n2 = g.n2();

    std::vector<double> gv(g.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t k = 0; k < g.size(); ++k)
        if (field.defined(k))
            gv[k] = field[k] - base - tilt.dot(g.node(k) - center) - t;

    // Flood fill of {g < 0} from the corners of the cell holding the center.
    std::vector<char> in(g.size(), 0);
    std::vector<std::size_t> stack;
    const int i0 = int(std::floor((center.x() - g.x1_lo()) / g.h1()));
    const int j0 = int(std::floor((center.y() - g.x2_lo()) / g.h2()));
    for (int di = 0; di <= 1; ++di)
        for (int dj = 0; dj <= 1; ++dj) {
            const int i = i0 + di, j = j0 + dj;
            if (i < 0 || j < 0 || i >= n1 || j >= n2)
                continue;
            const std::size_t k = g.index(i, j);
            if (gv[k] < 0 && !in[k]) {
                in[k] = 1;
                stack.push_back(k);
            }
        }
    if (stack.empty())
        throw DegeneracyError("section at t = " + std::to_string(t) + " is smaller than a cell");

    std::vector<Vec2> crossings;
    const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
    while (!stack.empty()) {
        const std::size_t k = stack.back();
        stack.pop_back();
        const int i = g.i_of(k), j = g.j_of(k);
        for (int m = 0; m < 4; ++m) {
            const int a = i + di[m], b = j + dj[m];
            if (a < 0 || b < 0 || a >= n1 || b >= n2)
                throw OutOfDomainError("section at t = " + std::to_string(t) + " reaches the grid edge");
            const std::size_t q = g.index(a, b);
            if (std::isnan(gv[q]))
                throw OutOfDomainError("section at t = " + std::to_string(t)
                                       + " reaches the edge of the defined region");
            if (gv[q] < 0) {
                if (!in[q]) {
                    in[q] = 1;
                    stack.push_back(q);
                }
            } else {
                const double s = gv[k] / (gv[k] - gv[q]);
                crossings.push_back(g.node(k) + s * (g.node(q) - g.node(k)));
            }
        }
    }
    SectionShape out;
    out.center = center;
    out.t = t;
    out.tilt = tilt;
    out.polygon = convex_hull(std::move(crossings));
    if (out.polygon.size() < 3)
        throw DegeneracyError("section at t = " + std::to_string(t) + " is degenerate");
    return out;
}

SectionShape centered_section(const ScalarField& field, double t, const CenteredOptions& opts,
                              const Vec2& center)
{
    const double h = field.grid().spacing();
    Vec2 p = field_gradient(field, center);
    Vec2 c = Vec2::Zero();
    for (int it = 0; it < opts.max_iterations; ++it) {
        SectionShape s = section(field, center, t, p);
        c = polygon_centroid(s.polygon) - center;
        if (c.norm() < 0.25 * h)
            return s;
        // For u = x.Hx/2 the centroid is H^{-1} p and H ~ (t/2) Cov^{-1}.
        const Mat2 H = 0.5 * t * polygon_covariance(s.polygon).inverse();
        p -= opts.damping * (H * c);
    }
    throw IterationError("centered section at t = " + std::to_string(t) + " did not converge", c.norm());
}

EccentricityTrace eccentricity_trace(const ScalarField& field, std::vector<double> t_values,
                                     bool centered, double min_cells, const Vec2& center)
{
    std::sort(t_values.begin(), t_values.end(), std::greater<>());
    EccentricityTrace tr;
    const double h = field.grid().spacing();
    for (double t : t_values) {
        SectionShape s;
        try {
            s = centered ? centered_section(field, t, {}, center) : section(field, center, t);
        } catch (const OutOfDomainError&) {
            tr.warnings.push_back("t = " + std::to_string(t) + ": section leaves the grid, skipped");
            continue;
        } catch (const DegeneracyError&) {
            tr.warnings.push_back("t = " + std::to_string(t) + ": section below grid resolution, trace truncated");
            break;
        }
        double width = std::numeric_limits<double>::infinity();
        for (int m = 0; m < 90; ++m) {
            const double a = std::numbers::pi * m / 90;
            const Vec2 e(std::cos(a), std::sin(a));
            width = std::min(width, support(s.polygon, s.center, e) + support(s.polygon, s.center, -e));
        }
        if (width < min_cells * h) {
            tr.warnings.push_back("t = " + std::to_string(t) + ": section spans fewer than "
                                  + std::to_string(min_cells) + " cells, trace truncated");
            break;
        }
        TraceEntry e;
        e.t = t;
        e.frame = john_ellipse(s);
        e.shape = std::move(s);
        tr.entries.push_back(std::move(e));
    }
    return tr;
}

void write_trace_csv(std::ostream& out, const EccentricityTrace& trace)
{
    out << "t,a11,a21,a22,r,norm_A,sandwich_k\n";
    out.precision(12);
    for (const TraceEntry& e : trace.entries)
        out << e.t << ',' << e.frame.A(0, 0) << ',' << e.frame.A(1, 0) << ',' << e.frame.A(1, 1) << ','
            << e.frame.r << ',' << e.frame.norm_A() << ',' << e.frame.sandwich_constant << '\n';
}

std::string to_string(Verdict v)
{
    switch (v) {
    case Verdict::radial: return "Radial";
    case Verdict::non_radial: return "NonRadial";
    default: return "Inconclusive";
    }
}

SlopeFit eccentricity_slope(const EccentricityTrace& trace, double t_lo, double t_hi)
{
    std::vector<double> x, y;
    for (const TraceEntry& e : trace.entries)
        if (e.t >= t_lo * (1 - 1e-12) && e.t <= t_hi * (1 + 1e-12)) {
            x.push_back(std::log(e.t));
            y.push_back(std::log(e.frame.eccentricity()));
        }
    SlopeFit f;
    f.t_lo = t_lo;
    f.t_hi = t_hi;
    f.points = int(x.size());
    if (x.size() < 2)
        return f;
    const double n = double(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i] / n;
        my += y[i] / n;
    }
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    const double b = sxy / sxx;
    f.slope = -b;
    f.r2 = syy > 0 ? b * sxy / syy : 1.0;
    return f;
}

BehaviorReport classify_behavior(const EccentricityTrace& trace, const Regime& regime,
                                 const ClassifierOptions& opts)
{
    if (trace.entries.size() < 3)
        throw DomainError("classification needs at least 3 trace entries");
    const double t_max = trace.entries.front().t, t_min = trace.entries.back().t;
    if (std::log10(t_max / t_min) < 1.5 - 1e-9)
        throw DomainError("classification needs a trace spanning 1.5 decades of t");

    BehaviorReport r;
    r.c_fit = std::numeric_limits<double>::infinity();
    r.C_fit = 0.0;
    for (const TraceEntry& e : trace.entries) {
        r.trace.emplace_back(e.t, e.frame.norm_A());
        r.sup_eccentricity = std::max(r.sup_eccentricity, e.frame.eccentricity());
        for (const Vec2& v : e.shape.polygon) {
            const double q = e.t / std::pow((v - e.shape.center).norm(), regime.beta);
            r.c_fit = std::min(r.c_fit, q);
            r.C_fit = std::max(r.C_fit, q);
        }
    }
    r.slope_fit = eccentricity_slope(trace, t_min, std::min(t_max, t_min * std::pow(10.0, opts.decades)));

    // Anisotropic scaling read off the smallest section.
    const TraceEntry& last = trace.entries.back();
    r.frame = last.frame;
    Eigen::SelfAdjointEigenSolver<Mat2> es(last.frame.shape_matrix());
    const Vec2 e_short = es.eigenvectors().col(0), e_long = es.eigenvectors().col(1);
    const auto& poly = last.shape.polygon;
    const Vec2 c = last.shape.center;
    const double X1 = 0.5 * (support(poly, c, e_long) + support(poly, c, -e_long));
    const double X2 = 0.5 * (support(poly, c, e_short) + support(poly, c, -e_short));
    const double al = regime.alpha;
    const double beta1 = last.t / std::pow(X1, 2 + al);
    const double beta2 = last.t / (X2 * X2);
    r.a_from_long_axis = (al + 2) * (al + 1) * beta1;
    r.a_from_short_axis = 1.0 / (2.0 * beta2);
    r.a = std::sqrt(r.a_from_long_axis * r.a_from_short_axis);
    r.product_check = 2 * (2 + al) * (1 + al) * beta1 * beta2;

    const SlopeFit& s = r.slope_fit;
    const bool trend = s.slope >= opts.slope_min && s.r2 >= opts.r2_min;
    const bool flat = std::abs(s.slope) < opts.slope_min;
    std::ostringstream d;
    d << "slope " << s.slope << " (R^2 " << s.r2 << ", " << s.points << " points over t in [" << s.t_lo
      << ", " << s.t_hi << "]), sup eccentricity " << r.sup_eccentricity << ", product check "
      << r.product_check;
    if (trend && std::abs(r.product_check - 1.0) <= opts.product_tol) {
        r.verdict = Verdict::non_radial;
    } else if (flat && r.sup_eccentricity < opts.e_max) {
        r.verdict = Verdict::radial;
    } else {
        r.verdict = Verdict::inconclusive;
        if (trend)
            d << "; growth trend present but the fitted profile misses the coefficient relation";
        else if (!flat)
            d << "; slope not flat but the trend is not clean";
        else
            d << "; eccentricity above e_max without a trend";
    }
    r.diagnostics = d.str();
    return r;
}

std::string to_json(const BehaviorReport& r)
{
    using nlohmann::json;
    json j;
    j["verdict"] = to_string(r.verdict);
    j["c_fit"] = r.c_fit;
    j["C_fit"] = r.C_fit;
    j["a"] = r.a;
    j["a_from_long_axis"] = r.a_from_long_axis;
    j["a_from_short_axis"] = r.a_from_short_axis;
    j["product_check"] = r.product_check;
    j["frame"] = {{"a11", r.frame.A(0, 0)}, {"a21", r.frame.A(1, 0)}, {"a22", r.frame.A(1, 1)},
                  {"r", r.frame.r}, {"sandwich_k", r.frame.sandwich_constant}};
    j["slope_fit"] = {{"slope", r.slope_fit.slope}, {"r2", r.slope_fit.r2}, {"t_lo", r.slope_fit.t_lo},
                      {"t_hi", r.slope_fit.t_hi}, {"points", r.slope_fit.points}};
    j["sup_eccentricity"] = r.sup_eccentricity;
    j["trace"] = json::array();
    for (const auto& [t, n] : r.trace)
        j["trace"].push_back({{"t", t}, {"norm_A", n}});
    j["diagnostics"] = r.diagnostics;
    return j.dump(2);
}

double mu_measure(const std::vector<Vec2>& p, double alpha)
{
    if (!(alpha > -2.0))
        throw DomainError("mu_measure needs alpha > -2");
    const double e = alpha + 2.0;
    double total = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const Vec2& a = p[i];
        const Vec2& b = p[(i + 1) % p.size()];
        const double w = cross(a, b);
        const Vec2 edge = b - a;
        const double len = edge.norm();
        if (len == 0.0 || std::abs(w) <= 1e-300)
            continue;
        // Triangle (0, a, b) in polar coordinates: r runs to d / cos(psi).
        Vec2 n(edge.y() / len, -edge.x() / len);
        if (n.dot(a) < 0)
            n = -n;
        const double d = n.dot(a);
        const double phi = std::atan2(n.y(), n.x());
        auto rel = [&](const Vec2& v) {
            return std::remainder(std::atan2(v.y(), v.x()) - phi, 2 * std::numbers::pi);
        };
        double lo = rel(a), hi = rel(b);
        if (lo > hi)
            std::swap(lo, hi);
        const auto I = detail::adaptive_gauss(
            [&](double psi) { return std::pow(1.0 / std::max(std::cos(psi), 1e-300), e); }, lo, hi,
            1e-12, 40);
        total += std::copysign(std::pow(d, e) / e * I.value, w);
    }
    return std::abs(total);
}

double mu_measure(const SectionShape& region, double alpha)
{
    return mu_measure(region.polygon, alpha);
}

std::vector<Vec2> ellipse_polygon(const EllipseSpec& e, double scale, int n)
{
    std::vector<Vec2> p(n);
    for (int i = 0; i < n; ++i) {
        const double a = 2 * std::numbers::pi * i / n;
        p[i] = e.center + scale * (e.M * Vec2(std::cos(a), std::sin(a)));
    }
    if (e.M.determinant() < 0)
        std::reverse(p.begin(), p.end());
    return p;
}

std::vector<Vec2> clip_convex(const std::vector<Vec2>& subject, const std::vector<Vec2>& clip)
{
    std::vector<Vec2> out = subject;
    for (std::size_t i = 0; i < clip.size() && !out.empty(); ++i) {
        const Vec2& a = clip[i];
        const Vec2& b = clip[(i + 1) % clip.size()];
        auto side = [&](const Vec2& p) { return cross(b - a, p - a); };
        std::vector<Vec2> in = std::move(out);
        out.clear();
        for (std::size_t j = 0; j < in.size(); ++j) {
            const Vec2& p = in[j];
            const Vec2& q = in[(j + 1) % in.size()];
            const double sp = side(p), sq = side(q);
            if (sp >= 0)
                out.push_back(p);
            if ((sp >= 0) != (sq >= 0))
                out.push_back(p + (sp / (sp - sq)) * (q - p));
        }
    }
    return out;
}

DoublingReport doubling_check(double alpha, const std::vector<EllipseSpec>& family)
{
    const std::vector<Vec2> disc = ellipse_polygon({Vec2::Zero(), Mat2::Identity()}, 1.0, 8192);
    DoublingReport rep;
    rep.infimum = std::numeric_limits<double>::infinity();
    for (const EllipseSpec& e : family) {
        const double small = mu_measure(clip_convex(ellipse_polygon(e), disc), alpha);
        const double big = mu_measure(clip_convex(ellipse_polygon(e, 2.0), disc), alpha);
        const double ratio = small / big;
        rep.ratios.push_back(ratio);
        rep.infimum = std::min(rep.infimum, ratio);
    }
    return rep;
}

}  // namespace malab
