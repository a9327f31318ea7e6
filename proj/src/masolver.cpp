#include "malab/masolver.hpp"

#include "malab/expression.hpp"
#include "malab/regime.hpp"
#include "sparse_solve.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

namespace malab {

namespace {

using Eigen::VectorXd;

// Orthogonal direction pairs in index units, ordered by stencil width.
std::vector<std::array<Eigen::Vector2i, 2>> direction_pairs(int width)
{
    using V = Eigen::Vector2i;
    std::vector<std::array<V, 2>> pairs = {{V(1, 0), V(0, 1)}, {V(1, 1), V(-1, 1)}};
    if (width >= 2) {
        pairs.push_back({V(2, 1), V(-1, 2)});
        pairs.push_back({V(1, 2), V(-2, 1)});
    }
    if (width >= 3) {
        pairs.push_back({V(3, 1), V(-1, 3)});
        pairs.push_back({V(1, 3), V(-3, 1)});
        pairs.push_back({V(3, 2), V(-2, 3)});
        pairs.push_back({V(2, 3), V(-3, 2)});
    }
    return pairs;
}

// One side of a second difference: either a grid unknown or a point on the
// circle carrying Dirichlet data.
struct Arm {
    int unknown = -1;
    double len = 0.0;
    double value = 0.0;
};

// Coefficients of D_e u = cf u_f + cb u_b + cc u_c along a unit direction.
struct Weights {
    double f, b, c;
};

Weights weights(double a, double b)
{
    const double wf = 2.0 / (a * (a + b));
    const double wb = 2.0 / (b * (a + b));
    return {wf, wb, -(wf + wb)};
}

class Discretization {
public:
    Discretization(const DirichletProblem& p, int width) : grid_(p.grid)
    {
        const DiscGrid& g = p.grid;
        if (g.kind() != GridKind::cartesian || g.radius() <= 0.0)
            throw DomainError("the Monge-Ampere solver needs a cartesian disc grid");
        if (std::abs(g.h1() - g.h2()) > 1e-12 * g.h1())
            throw DomainError("the Monge-Ampere solver needs equal spacing in x1 and x2");
        if (!p.boundary)
            throw DomainError("problem has no boundary data");
        h_ = g.h1();
        R_ = g.radius();

        const auto pairs = direction_pairs(width);
        for (const auto& pr : pairs) {
            pair_dirs_.push_back({int(dirs_.size()), int(dirs_.size()) + 1});
            dirs_.push_back(pr[0]);
            dirs_.push_back(pr[1]);
        }

        unknown_of_.assign(g.size(), -1);
        for (std::size_t k = 0; k < g.size(); ++k) {
            if (g.mask(k) != NodeKind::inside)
                continue;
            if (R_ - g.node(k).norm() < 1e-3 * h_)
                continue;
            unknown_of_[k] = int(node_of_.size());
            node_of_.push_back(k);
        }

        const int nd = int(dirs_.size());
        arms_.resize(node_of_.size() * nd * 2);
        for (std::size_t u = 0; u < node_of_.size(); ++u) {
            const std::size_t k = node_of_[u];
            const int i = g.i_of(k), j = g.j_of(k);
            const Vec2 x = g.node(k);
            for (int m = 0; m < nd; ++m) {
                for (int side = 0; side < 2; ++side) {
                    const Eigen::Vector2i v = side == 0 ? dirs_[m] : Eigen::Vector2i(-dirs_[m]);
                    const Vec2 d(v.x() * h_, v.y() * h_);
                    Arm& arm = arms_[(u * nd + m) * 2 + side];
                    const int ti = i + v.x(), tj = j + v.y();
                    int target = -1;
                    if (ti >= 0 && tj >= 0 && ti < g.n1() && tj < g.n2())
                        target = unknown_of_[g.index(ti, tj)];
                    if (target >= 0) {
                        arm.unknown = target;
                        arm.len = d.norm();
                        continue;
                    }
                    // |x + s d| = R
                    const double xd = x.dot(d), dd = d.squaredNorm();
                    const double disc = xd * xd - dd * (x.squaredNorm() - R_ * R_);
                    double s = (-xd + std::sqrt(std::max(disc, 0.0))) / dd;
                    s = std::clamp(s, 1e-6, 1.0);
                    Vec2 y = x + s * d;
                    y *= R_ / y.norm();
                    arm.len = s * d.norm();
                    arm.value = p.boundary(y);
                }
            }
        }

        // For a singular power rhs the solution is a cusp at the origin, where
        // second differences scale with a power of the arm length and the
        // minimum over pairs is biased toward the long diagonal arms. The
        // origin node keeps the axis pair only.
        if (const auto* pw = std::get_if<PowerRhs>(&p.rhs); pw && pw->alpha < 0.0)
            for (std::size_t u = 0; u < node_of_.size(); ++u)
                if (g.node(node_of_[u]).norm() < 1e-12 * h_)
                    axis_only_ = int(u);

        rhs_.resize(node_of_.size());
        for (std::size_t u = 0; u < node_of_.size(); ++u)
            rhs_[u] = rhs_at(p, node_of_[u]);
    }

    std::size_t size() const noexcept { return node_of_.size(); }
    int n_dirs() const noexcept { return int(dirs_.size()); }
    int n_pairs(std::size_t u) const noexcept
    {
        return int(u) == axis_only_ ? 1 : int(pair_dirs_.size());
    }
    std::array<int, 2> pair(int p) const { return pair_dirs_[p]; }
    double h() const noexcept { return h_; }
    double rhs(std::size_t u) const { return rhs_[u]; }
    std::size_t node(std::size_t u) const { return node_of_[u]; }
    const Arm& arm(std::size_t u, int m, int side) const
    {
        return arms_[(u * dirs_.size() + m) * 2 + side];
    }

    double value(const VectorXd& x, const Arm& a) const
    {
        return a.unknown >= 0 ? x[a.unknown] : a.value;
    }

    double second_difference(const VectorXd& x, std::size_t u, int m) const
    {
        const Arm& f = arm(u, m, 0);
        const Arm& b = arm(u, m, 1);
        const Weights w = weights(f.len, b.len);
        return w.f * value(x, f) + w.b * value(x, b) + w.c * x[u];
    }

    // Adds c * D_m to row u of the Jacobian.
    void add_difference(detail::Triplets& t, std::size_t u, int m, double c) const
    {
        const Arm& f = arm(u, m, 0);
        const Arm& b = arm(u, m, 1);
        const Weights w = weights(f.len, b.len);
        if (f.unknown >= 0)
            t.emplace_back(int(u), f.unknown, c * w.f);
        if (b.unknown >= 0)
            t.emplace_back(int(u), b.unknown, c * w.b);
        t.emplace_back(int(u), int(u), c * w.c);
    }

    // Extends the compact solution to every grid node: boundary data on the
    // circle, radially constant extension outside it.
    ScalarField to_field(const VectorXd& x, const BoundaryFn& boundary) const
    {
        std::vector<double> v(grid_.size());
        for (std::size_t k = 0; k < v.size(); ++k) {
            if (unknown_of_[k] >= 0) {
                v[k] = x[unknown_of_[k]];
            } else {
                const Vec2 p = grid_.node(k);
                const double r = p.norm();
                v[k] = boundary(r > 0 ? Vec2(p * (R_ / r)) : Vec2(R_, 0.0));
            }
        }
        return ScalarField(grid_, std::move(v));
    }

    VectorXd from_field(const ScalarField& f) const
    {
        VectorXd x(size());
        for (std::size_t u = 0; u < size(); ++u)
            x[u] = f[node_of_[u]];
        return x;
    }

    bool trusted(std::size_t u) const
    {
        const double r = grid_.node(node_of_[u]).norm();
        return r >= 3.0 * h_ - 1e-12 && r <= R_ - 3.0 * h_ + 1e-12;
    }

private:
    DiscGrid grid_;
    double h_ = 0.0;
    double R_ = 1.0;
    std::vector<Eigen::Vector2i> dirs_;
    std::vector<std::array<int, 2>> pair_dirs_;
    std::vector<int> unknown_of_;
    std::vector<std::size_t> node_of_;
    std::vector<Arm> arms_;
    std::vector<double> rhs_;
    int axis_only_ = -1;
};

// max(D1,d) max(D2,d) + min(D1-d,0) + min(D2-d,0): equals D1 D2 on convex
// stencils and is nondecreasing in both second differences.
double pair_operator(double d1, double d2, double delta)
{
    return std::max(d1, delta) * std::max(d2, delta) + std::min(d1 - delta, 0.0)
         + std::min(d2 - delta, 0.0);
}

struct Evaluation {
    VectorXd value;              // MA_h(u) - f
    std::vector<int> active;     // minimizing pair per node
};

Evaluation evaluate(const Discretization& disc, const VectorXd& x, double delta)
{
    Evaluation e;
    e.value.resize(disc.size());
    e.active.resize(disc.size());
    for (std::size_t u = 0; u < disc.size(); ++u) {
        double best = std::numeric_limits<double>::infinity();
        int arg = 0;
        for (int p = 0; p < disc.n_pairs(u); ++p) {
            const auto [m1, m2] = disc.pair(p);
            const double v = pair_operator(disc.second_difference(x, u, m1),
                                           disc.second_difference(x, u, m2), delta);
            if (v < best) {
                best = v;
                arg = p;
            }
        }
        e.value[u] = best - disc.rhs(u);
        e.active[u] = arg;
    }
    return e;
}

detail::SparseMatrix jacobian(const Discretization& disc, const VectorXd& x,
                              const std::vector<int>& active, double delta)
{
    detail::Triplets t;
    t.reserve(disc.size() * 5);
    for (std::size_t u = 0; u < disc.size(); ++u) {
        const auto [m1, m2] = disc.pair(active[u]);
        const double d1 = disc.second_difference(x, u, m1);
        const double d2 = disc.second_difference(x, u, m2);
        const double c1 = d1 >= delta ? std::max(d2, delta) : 1.0;
        const double c2 = d2 >= delta ? std::max(d1, delta) : 1.0;
        disc.add_difference(t, u, m1, c1);
        disc.add_difference(t, u, m2, c2);
    }
    detail::SparseMatrix J(disc.size(), disc.size());
    J.setFromTriplets(t.begin(), t.end());
    return J;
}

// Laplace u = 2 sqrt(f) with the same cut-cell boundary treatment.
VectorXd initial_guess(const Discretization& disc)
{
    detail::Triplets t;
    VectorXd b(disc.size());
    for (std::size_t u = 0; u < disc.size(); ++u) {
        double rhs = 2.0 * std::sqrt(std::max(disc.rhs(u), 0.0));
        for (int m = 0; m < 2; ++m) {
            const Arm& f = disc.arm(u, m, 0);
            const Arm& bk = disc.arm(u, m, 1);
            const Weights w = weights(f.len, bk.len);
            if (f.unknown >= 0)
                t.emplace_back(int(u), f.unknown, w.f);
            else
                rhs -= w.f * f.value;
            if (bk.unknown >= 0)
                t.emplace_back(int(u), bk.unknown, w.b);
            else
                rhs -= w.b * bk.value;
            t.emplace_back(int(u), int(u), w.c);
        }
        b[u] = rhs;
    }
    detail::SparseMatrix A(disc.size(), disc.size());
    A.setFromTriplets(t.begin(), t.end());
    return detail::sparse_solve(A, b);
}

double trusted_sup(const Discretization& disc, const VectorXd& r)
{
    double s = 0.0;
    for (std::size_t u = 0; u < disc.size(); ++u)
        if (disc.trusted(u))
            s = std::max(s, std::abs(r[u]));
    return s;
}

double convexity_margin(const Discretization& disc, const VectorXd& x)
{
    double m = std::numeric_limits<double>::infinity();
    const double h2 = disc.h() * disc.h();
    for (std::size_t u = 0; u < disc.size(); ++u)
        for (int d = 0; d < disc.n_dirs(); ++d)
            m = std::min(m, disc.second_difference(x, u, d) * h2);
    return m;
}

}  // namespace

double power_cell_average(double alpha, double half_width)
{
    if (!(alpha > -2.0))
        throw DomainError("cell average of |x|^alpha needs alpha > -2");
    // Mean over [-1,1]^2 is 2/(alpha+2) * int_0^{pi/4} sec(phi)^{alpha+2} dphi.
    using GL = boost::math::quadrature::gauss<double, 30>;
    const double I = GL::integrate(
        [&](double phi) { return std::pow(1.0 / std::cos(phi), alpha + 2.0); }, 0.0,
        std::numbers::pi / 4);
    return std::pow(half_width, alpha) * 2.0 * I / (alpha + 2.0);
}

double power_cell_average(double alpha, double half_width, const Vec2& center)
{
    using GL = boost::math::quadrature::gauss<double, 20>;
    const double s = half_width;
    return GL::integrate(
               [&](double a) {
                   return GL::integrate(
                       [&](double b) { return std::pow(Vec2(center.x() + a, center.y() + b).norm(), alpha); },
                       -s, s);
               },
               -s, s)
         / (4.0 * s * s);
}

double rhs_at(const DirichletProblem& p, std::size_t k)
{
    if (const auto* pw = std::get_if<PowerRhs>(&p.rhs)) {
        const Vec2 x = p.grid.node(k);
        const double r = x.norm();
        const double h = p.grid.spacing();
        if (r < 1e-12 * h)
            return pw->c * power_cell_average(pw->alpha, 0.5 * h);
        return pw->c * std::pow(r, pw->alpha);
    }
    const auto& f = std::get<ScalarField>(p.rhs);
    if (f.grid().size() != p.grid.size())
        throw DomainError("rhs grid does not match problem grid");
    return f[k];
}

ConvexSolution solve(const DirichletProblem& problem, const SolverOptions& opts)
{
    if (!(opts.tol > 0.0))
        throw DomainError("solver tolerance must be positive");
    const Discretization disc(problem, opts.stencil_width);
    for (std::size_t u = 0; u < disc.size(); ++u)
        if (!(disc.rhs(u) >= 0.0) || !std::isfinite(disc.rhs(u)))
            throw DomainError("rhs must be finite and nonnegative");

    VectorXd x = initial_guess(disc);
    Evaluation ev = evaluate(disc, x, opts.delta);
    double norm = ev.value.norm();
    const double h2 = disc.h() * disc.h();

    ConvexSolution out{disc.to_field(x, problem.boundary)};
    int it = 0;
    double update = std::numeric_limits<double>::infinity();
    for (; it < opts.max_iterations; ++it) {
        const detail::SparseMatrix J = jacobian(disc, x, ev.active, opts.delta);
        const VectorXd dx = detail::sparse_solve(J, -ev.value);

        double lambda = 1.0;
        bool accepted = false;
        VectorXd trial;
        Evaluation tev;
        for (int ls = 0; ls < 30; ++ls, lambda *= 0.5) {
            trial = x + lambda * dx;
            tev = evaluate(disc, trial, opts.delta);
            const double tn = tev.value.norm();
            if (tn < norm) {
                accepted = true;
                norm = tn;
                break;
            }
        }
        if (!accepted) {
            // Stalled at roundoff: accept the iterate if the residual is already tiny.
            if (ev.value.lpNorm<Eigen::Infinity>() <= 1e3 * opts.tol)
                break;
            throw SolverDivergence("damped Newton could not reduce the Monge-Ampere residual",
                                   ev.value.lpNorm<Eigen::Infinity>(),
                                   disc.to_field(x, problem.boundary));
        }
        update = lambda * dx.lpNorm<Eigen::Infinity>();
        x = std::move(trial);
        ev = std::move(tev);
        if (opts.verbose)
            std::cerr << "newton " << it << ": |F|_2 = " << norm << "  |F|_inf = "
                      << ev.value.lpNorm<Eigen::Infinity>() << "  step = " << lambda
                      << "  update = " << update << '\n';
        if (update < opts.tol * h2) {
            ++it;
            break;
        }
    }
    if (it >= opts.max_iterations)
        throw SolverDivergence("Newton iteration cap reached", ev.value.lpNorm<Eigen::Infinity>(),
                               disc.to_field(x, problem.boundary));

    out.field = disc.to_field(x, problem.boundary);
    out.iterations = it;
    out.max_update = update;
    out.residual_sup = trusted_sup(disc, ev.value);
    out.convexity_margin = convexity_margin(disc, x);
    return out;
}

double residual(const ConvexSolution& solution, const DirichletProblem& problem,
                const SolverOptions& opts)
{
    if (!(solution.field.grid() == problem.grid)
        && solution.field.grid().size() != problem.grid.size())
        throw DomainError("solution and problem grids differ");
    const Discretization disc(problem, opts.stencil_width);
    const VectorXd x = disc.from_field(solution.field);
    return trusted_sup(disc, evaluate(disc, x, opts.delta).value);
}

DirichletProblem parse_problem(const std::string& text)
{
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            continue;
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    if (!kv.count("alpha"))
        throw DomainError("problem file needs alpha=");

    std::map<std::string, double> consts;
    for (const auto& [k, v] : kv) {
        char* end = nullptr;
        const double d = std::strtod(v.c_str(), &end);
        if (end && *end == '\0' && !v.empty())
            consts[k] = d;
    }
    const Regime reg = regime_from_alpha(consts.at("alpha"));
    consts.emplace("beta", reg.beta);
    consts.emplace("c_alpha", reg.c_alpha);
    consts.emplace("gamma", reg.gamma);
    consts.emplace("c", 1.0);
    consts.emplace("eps", 0.0);

    int n = 256;
    double radius = 1.0;
    if (kv.count("grid")) {
        const std::string g = kv["grid"];
        if (g.rfind("cartesian:", 0) != 0)
            throw DomainError("grid must be cartesian:N[:R]");
        std::istringstream gs(g.substr(10));
        char colon = 0;
        gs >> n;
        if (gs >> colon >> radius; colon != ':')
            radius = 1.0;
    }
    DirichletProblem p{PowerRhs{consts.at("c"), reg.alpha}, {}, DiscGrid::cartesian(n, radius)};

    const std::string b = kv.count("boundary") ? kv["boundary"] : "c_alpha*r^beta";
    if (b.rfind("samples:", 0) == 0) {
        std::vector<double> s;
        std::istringstream ss(b.substr(8));
        std::string tok;
        while (std::getline(ss, tok, ','))
            s.push_back(std::stod(tok));
        if (s.size() < 4)
            throw DomainError("boundary samples need at least 4 values");
        // Periodic cubic Lagrange in theta.
        p.boundary = [s](const Vec2& x) {
            const int n = int(s.size());
            double t = std::atan2(x.y(), x.x());
            if (t < 0)
                t += 2 * std::numbers::pi;
            const double q = t / (2 * std::numbers::pi) * n;
            const int j0 = int(std::floor(q)) - 1;
            const double sj = q - j0;
            double acc = 0.0;
            for (int a = 0; a < 4; ++a) {
                double w = 1.0;
                for (int c = 0; c < 4; ++c)
                    if (c != a)
                        w *= (sj - c) / double(a - c);
                acc += w * s[((j0 + a) % n + n) % n];
            }
            return acc;
        };
    } else {
        const Expression e(b);
        p.boundary = [e, consts](const Vec2& x) {
            auto vars = consts;
            vars["x1"] = x.x();
            vars["x2"] = x.y();
            vars["r"] = x.norm();
            vars["theta"] = std::atan2(x.y(), x.x());
            return e(vars);
        };
        p.boundary(Vec2(radius, 0.0));  // surfaces unknown variables early
    }
    return p;
}

DirichletProblem load_problem(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_problem(ss.str());
}

}  // namespace malab
