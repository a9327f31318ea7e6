#include "malab/legendre.hpp"

#include "fd_weights.hpp"
#include "sparse_solve.hpp"

#include "json.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>

namespace malab {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

// u* along one column as scattered Hermite data in y2.
struct Slice {
    std::vector<double> y, f, df, d2f;  // y2, u*, x2, 1/u_x2x2
};

// f on [0,1] from values, first and second derivatives at both ends
// (derivatives already scaled by the interval length).
double quintic_hermite(double t, double f0, double d0, double s0, double f1, double d1, double s1)
{
    const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
    const double h0 = 1 - 10 * t3 + 15 * t4 - 6 * t5;
    const double h1 = t - 6 * t3 + 8 * t4 - 3 * t5;
    const double h2 = 0.5 * (t2 - 3 * t3 + 3 * t4 - t5);
    const double h3 = 0.5 * (t3 - 2 * t4 + t5);
    const double h4 = -4 * t3 + 7 * t4 - 3 * t5;
    const double h5 = 10 * t3 - 15 * t4 + 6 * t5;
    return f0 * h0 + d0 * h1 + s0 * h2 + s1 * h3 + d1 * h4 + f1 * h5;
}

double evaluate(const Slice& s, double y)
{
    if (s.y.empty() || y < s.y.front() || y > s.y.back())
        return nan;
    auto it = std::upper_bound(s.y.begin(), s.y.end(), y);
    std::size_t b = std::size_t(it - s.y.begin());
    if (b >= s.y.size())
        b = s.y.size() - 1;
    const std::size_t a = b - 1;
    const double d = s.y[b] - s.y[a];
    return quintic_hermite((y - s.y[a]) / d, s.f[a], d * s.df[a], d * d * s.d2f[a], s.f[b],
                           d * s.df[b], d * d * s.d2f[b]);
}

struct Transform {
    std::vector<Slice> slices;  // per column
    std::vector<Vec2> image;
};

Transform transform_columns(const ScalarField& field)
{
    const DiscGrid& g = field.grid();
    if (g.kind() != GridKind::cartesian)
        throw DomainError("partial Legendre transform needs a cartesian grid");
    const double h = g.h2();
    Transform tr;
    tr.slices.resize(g.n1());
    tr.image.assign(g.size(), Vec2(nan, nan));

    for (int i = 0; i < g.n1(); ++i) {
        // Longest contiguous run of defined nodes in the column.
        int best_lo = 0, best_len = 0;
        for (int j = 0; j < g.n2();) {
            if (!field.defined(g.index(i, j))) {
                ++j;
                continue;
            }
            int e = j;
            while (e < g.n2() && field.defined(g.index(i, e)))
                ++e;
            if (e - j > best_len) {
                best_len = e - j;
                best_lo = j;
            }
            j = e;
        }
        if (best_len < 7)
            continue;

        const detail::RunStencils st = detail::run_stencils(best_len);
        Slice& s = tr.slices[i];
        for (int p = 0; p < best_len; ++p) {
            double d1 = 0.0, d2 = 0.0;
            for (int q = 0; q < st.width; ++q) {
                const double v = field.at(i, best_lo + st.start[p] + q);
                d1 += st.d1[p][q] * v;
                d2 += st.d2[p][q] * v;
            }
            d1 /= h;
            d2 /= h * h;
            const std::size_t k = g.index(i, best_lo + p);
            const double x2 = g.node(k).y();
            if (!(d2 > 0.0) || (!s.y.empty() && !(d1 > s.y.back())))
                throw DegeneracyError("column x1 = " + std::to_string(g.node(k).x())
                                      + " is not strictly convex in x2");
            s.y.push_back(d1);
            s.f.push_back(x2 * d1 - field[k]);
            s.df.push_back(x2);
            s.d2f.push_back(1.0 / d2);
            tr.image[k] = Vec2(g.node(k).x(), d1);
        }
    }
    return tr;
}

ScalarField resample(const Transform& tr, const ScalarField& field, const DiscGrid& target)
{
    const DiscGrid& g = field.grid();
    if (target.kind() != GridKind::cartesian || target.n1() != g.n1()
        || std::abs(target.x1_lo() - g.x1_lo()) > 1e-12 * g.h1()
        || std::abs(target.h1() - g.h1()) > 1e-12 * g.h1())
        throw DomainError("target grid columns must coincide with the x1 columns of the field");
    std::vector<double> v(target.size(), nan);
    for (std::size_t k = 0; k < target.size(); ++k)
        if (target.available(k))
            v[k] = evaluate(tr.slices[target.i_of(k)], target.node(k).y());
    return ScalarField(target, std::move(v));
}

}  // namespace

PartialLegendrePair partial_legendre(const ScalarField& field, const DiscGrid& target)
{
    Transform tr = transform_columns(field);
    ScalarField dual = resample(tr, field, target);
    return {field, std::move(dual), std::move(tr.image)};
}

PartialLegendrePair partial_legendre(const ScalarField& field)
{
    const DiscGrid& g = field.grid();
    Transform tr = transform_columns(field);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const Slice& s : tr.slices)
        if (!s.y.empty()) {
            lo = std::min(lo, s.y.front());
            hi = std::max(hi, s.y.back());
        }
    if (!(hi > lo))
        throw DegeneracyError("no column long enough for the partial Legendre transform");
    const DiscGrid dual_grid =
        DiscGrid::box(g.x1_lo(), g.x1_lo() + (g.n1() - 1) * g.h1(), g.n1(), lo, hi, g.n2());
    ScalarField dual = resample(tr, field, dual_grid);
    return {field, std::move(dual), std::move(tr.image)};
}

ScalarField solve_degenerate_linear(double alpha, double c, const BoundaryFn& boundary,
                                    const DiscGrid& grid)
{
    if (!(alpha > 0.0) || !(c > 0.0))
        throw DomainError("degenerate linear solve needs alpha > 0 and c > 0");
    if (grid.kind() != GridKind::cartesian || !(grid.radius() > 0.0))
        throw DomainError("degenerate linear solve needs a cartesian disc grid");
    const double R = grid.radius();
    const double h1 = grid.h1(), h2 = grid.h2();

    std::vector<int> unknown(grid.size(), -1);
    std::vector<std::size_t> nodes;
    for (std::size_t k = 0; k < grid.size(); ++k)
        if (grid.mask(k) == NodeKind::inside && R - grid.node(k).norm() >= 1e-3 * std::min(h1, h2)) {
            unknown[k] = int(nodes.size());
            nodes.push_back(k);
        }

    // Exact mean of |t|^alpha over [y - h/2, y + h/2].
    auto coefficient = [&](double y) {
        auto F = [&](double t) { return std::copysign(std::pow(std::abs(t), alpha + 1), t) / (alpha + 1); };
        return (F(y + 0.5 * h1) - F(y - 0.5 * h1)) / h1;
    };

    detail::Triplets t;
    Eigen::VectorXd b = Eigen::VectorXd::Zero(Eigen::Index(nodes.size()));
    for (std::size_t u = 0; u < nodes.size(); ++u) {
        const std::size_t k = nodes[u];
        const int i = grid.i_of(k), j = grid.j_of(k);
        const Vec2 x = grid.node(k);
        const double a = c * coefficient(x.x());
        for (int axis = 0; axis < 2; ++axis) {
            const double scale = axis == 0 ? 1.0 : a;
            const double hh = axis == 0 ? h1 : h2;
            double len[2];
            int nb[2];
            double val[2] = {0.0, 0.0};
            for (int side = 0; side < 2; ++side) {
                const int sgn = side == 0 ? 1 : -1;
                const int ti = i + (axis == 0 ? sgn : 0), tj = j + (axis == 1 ? sgn : 0);
                nb[side] = (ti >= 0 && tj >= 0 && ti < grid.n1() && tj < grid.n2())
                               ? unknown[grid.index(ti, tj)]
                               : -1;
                if (nb[side] >= 0) {
                    len[side] = hh;
                    continue;
                }
                // Cut the arm at the circle.
                const double p = axis == 0 ? x.x() : x.y(), q = axis == 0 ? x.y() : x.x();
                const double reach = std::sqrt(std::max(R * R - q * q, 0.0));
                len[side] = std::clamp(sgn > 0 ? reach - p : p + reach, 1e-6 * hh, hh);
                Vec2 y = x;
                (axis == 0 ? y.x() : y.y()) += sgn * len[side];
                y *= R / y.norm();
                val[side] = boundary(y);
            }
            const double wf = scale * 2.0 / (len[0] * (len[0] + len[1]));
            const double wb = scale * 2.0 / (len[1] * (len[0] + len[1]));
            t.emplace_back(int(u), int(u), -(wf + wb));
            if (nb[0] >= 0)
                t.emplace_back(int(u), nb[0], wf);
            else
                b[Eigen::Index(u)] -= wf * val[0];
            if (nb[1] >= 0)
                t.emplace_back(int(u), nb[1], wb);
            else
                b[Eigen::Index(u)] -= wb * val[1];
        }
    }
    detail::SparseMatrix A(Eigen::Index(nodes.size()), Eigen::Index(nodes.size()));
    A.setFromTriplets(t.begin(), t.end());
    const Eigen::VectorXd w = detail::sparse_solve(A, b);

    std::vector<double> v(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (unknown[k] >= 0) {
            v[k] = w[unknown[k]];
        } else {
            const Vec2 p = grid.node(k);
            const double r = p.norm();
            v[k] = boundary(r > 0 ? Vec2(p * (R / r)) : Vec2(R, 0.0));
        }
    }
    return ScalarField(grid, std::move(v));
}

ExpansionReport expansion_coefficients(const ScalarField& field, double alpha,
                                       const ExpansionOptions& opts)
{
    if (!(alpha > 0.0))
        throw DomainError("expansion fit needs alpha > 0");
    if (!(opts.rho_min > 0.0) || !(opts.rho_max >= opts.rho_min))
        throw DomainError("expansion windows need 0 < rho_min <= rho_max");
    const DiscGrid& g = field.grid();
    const double e = 2.0 + alpha;
    const double block_scale = 1.0 / ((alpha + 2.0) * (alpha + 1.0));

    ExpansionReport rep;
    rep.rho_min = opts.rho_min;
    rep.rho_max = opts.rho_max;

    double wmax = 0.0;
    std::vector<double> rhos;
    for (double rho = opts.rho_min; rho <= opts.rho_max * (1 + 1e-12); rho *= 2.0)
        rhos.push_back(rho);

    for (double rho : rhos) {
        std::vector<std::size_t> in;
        for (std::size_t k = 0; k < g.size(); ++k) {
            if (!field.defined(k))
                continue;
            const Vec2 y = g.node(k);
            if (std::pow(std::abs(y.x()), e) + y.y() * y.y() < rho * rho)
                in.push_back(k);
        }
        if (int(in.size()) < opts.min_nodes)
            throw FitError("expansion window rho = " + std::to_string(rho) + " holds only "
                           + std::to_string(in.size()) + " nodes");
        Eigen::MatrixXd A(Eigen::Index(in.size()), 5);
        Eigen::VectorXd b(Eigen::Index(in.size()));
        for (std::size_t r = 0; r < in.size(); ++r) {
            const Vec2 y = g.node(in[r]);
            A.row(Eigen::Index(r)) << 1.0, y.x(), y.y(), y.x() * y.y(),
                0.5 * y.y() * y.y() - block_scale * std::pow(std::abs(y.x()), e);
            b[Eigen::Index(r)] = field[in[r]];
            wmax = std::max(wmax, std::abs(field[in[r]]));
        }
        Eigen::VectorXd scale = A.cwiseAbs().colwise().maxCoeff().transpose();
        for (Eigen::Index j = 0; j < 5; ++j)
            if (scale[j] == 0.0)
                throw FitError("expansion window rho = " + std::to_string(rho) + " is degenerate");
        const Eigen::MatrixXd As = A * scale.cwiseInverse().asDiagonal();
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(As);
        qr.setThreshold(1e-10);
        if (qr.rank() < 5)
            throw FitError("expansion window rho = " + std::to_string(rho) + " is rank deficient");
        const Eigen::VectorXd coef = qr.solve(b).cwiseQuotient(scale);
        WindowFit wf;
        wf.rho = rho;
        wf.nodes = int(in.size());
        wf.max_residual = (A * coef - b).lpNorm<Eigen::Infinity>();
        for (int j = 0; j < 5; ++j)
            wf.coefficients[j] = coef[j];
        rep.windows.push_back(wf);
    }

    std::vector<double> lx, ly;
    for (WindowFit& wf : rep.windows) {
        wf.at_noise_floor = wf.max_residual <= opts.noise_floor * std::max(wmax, 1e-300);
        if (!wf.at_noise_floor) {
            lx.push_back(std::log(wf.rho * wf.rho));
            ly.push_back(std::log(wf.max_residual));
        }
    }
    if (lx.size() >= 2) {
        const double n = double(lx.size());
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            sx += lx[i];
            sy += ly[i];
            sxx += lx[i] * lx[i];
            sxy += lx[i] * ly[i];
        }
        rep.remainder_exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    } else {
        rep.remainder_exponent = std::numeric_limits<double>::infinity();
    }

    const WindowFit& first = rep.windows.front();
    rep.a0 = first.coefficients[0];
    rep.a1 = Vec2(first.coefficients[1], first.coefficients[2]);
    rep.a2 = first.coefficients[3];
    rep.a3 = first.coefficients[4];
    return rep;
}

std::string to_json(const ExpansionReport& r)
{
    using nlohmann::json;
    auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
    json j;
    j["a0"] = r.a0;
    j["a1"] = {r.a1.x(), r.a1.y()};
    j["a2"] = r.a2;
    j["a3"] = r.a3;
    j["remainder_exponent"] = num(r.remainder_exponent);
    j["fit_window"] = {r.rho_min, r.rho_max};
    j["windows"] = json::array();
    for (const WindowFit& w : r.windows)
        j["windows"].push_back({{"rho", w.rho},
                                {"nodes", w.nodes},
                                {"max_residual", w.max_residual},
                                {"at_noise_floor", w.at_noise_floor},
                                {"coefficients", std::vector<double>(w.coefficients, w.coefficients + 5)}});
    return j.dump(2);
}

}  // namespace malab
