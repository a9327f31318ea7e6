#include "malab/sections.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <numbers>

namespace malab {

double JohnFrame::norm_A() const
{
    return Eigen::JacobiSVD<Mat2>(A).singularValues()(0);
}

double JohnFrame::eccentricity() const
{
    const Eigen::Vector2d s = Eigen::JacobiSVD<Mat2>(A).singularValues();
    return s(0) / s(1);
}

Mat2 JohnFrame::shape_matrix() const
{
    Eigen::SelfAdjointEigenSolver<Mat2> es(A * A.transpose());
    return r * es.operatorSqrt();
}

namespace {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

struct Edge {
    Eigen::Matrix<double, 2, 3> J;  // M n = J m for m = (m11, m12, m22)
    double b2;                      // squared distance from the center to the edge line
};

struct Barrier {
    const std::vector<Edge>& edges;
    double mu;

    // Objective -log det M - mu sum log(b^2 - |M n|^2); +inf when infeasible.
    double value(const Vec3& m) const
    {
        const double d = m(0) * m(2) - m(1) * m(1);
        if (!(d > 0.0) || !(m(0) > 0.0))
            return std::numeric_limits<double>::infinity();
        double f = -std::log(d);
        for (const Edge& e : edges) {
            const double s = e.b2 - (e.J * m).squaredNorm();
            if (!(s > 0.0))
                return std::numeric_limits<double>::infinity();
            f -= mu * std::log(s);
        }
        return f;
    }

    void derivatives(const Vec3& m, Vec3& g, Mat3& H) const
    {
        const double d = m(0) * m(2) - m(1) * m(1);
        const Vec3 dd(m(2), -2 * m(1), m(0));
        Mat3 d2;
        d2 << 0, 0, 1, 0, -2, 0, 1, 0, 0;
        g = -dd / d;
        H = dd * dd.transpose() / (d * d) - d2 / d;
        for (const Edge& e : edges) {
            const Mat3 Q = e.J.transpose() * e.J;
            const Vec3 Qm = Q * m;
            const double s = e.b2 - m.dot(Qm);
            g += mu * 2.0 * Qm / s;
            H += mu * (2.0 * Q / s + 4.0 * Qm * Qm.transpose() / (s * s));
        }
    }
};

}  // namespace

JohnFrame john_ellipse(const SectionShape& shape)
{
    const auto& p = shape.polygon;
    if (p.size() < 3)
        throw DegeneracyError("John ellipse needs a polygon with at least 3 vertices");
    const double area = polygon_area(p);
    double diam = 0.0;
    for (const Vec2& v : p)
        diam = std::max(diam, (v - shape.center).norm());
    if (!(area > 1e-14 * diam * diam))
        throw DegeneracyError("John ellipse of a polygon with (nearly) zero area");

    std::vector<Edge> edges;
    double b_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < p.size(); ++i) {
        const Vec2 d = p[(i + 1) % p.size()] - p[i];
        const double len = d.norm();
        if (len == 0.0)
            continue;
        const Vec2 n(d.y() / len, -d.x() / len);
        const double b = n.dot(p[i] - shape.center);
        if (!(b > 1e-12 * diam))
            throw DegeneracyError("John ellipse center lies on or outside the polygon");
        Edge e;
        e.J << n.x(), n.y(), 0.0, 0.0, n.x(), n.y();
        e.b2 = b * b;
        edges.push_back(e);
        b_min = std::min(b_min, b);
    }

    // Work in units of b_min so the barrier is scale free.
    for (Edge& e : edges)
        e.b2 /= b_min * b_min;
    Vec3 m(0.5, 0.0, 0.5);
    for (double mu = 1.0; mu > 1e-13; mu *= 0.1) {
        const Barrier bar{edges, mu};
        for (int it = 0; it < 100; ++it) {
            Vec3 g;
            Mat3 H;
            bar.derivatives(m, g, H);
            const Vec3 step = -H.ldlt().solve(g);
            const double dec = -g.dot(step);
            if (dec < 1e-15)
                break;
            const double f0 = bar.value(m);
            double tau = 1.0;
            while (tau > 1e-12 && !(bar.value(m + tau * step) <= f0 - 0.25 * tau * dec))
                tau *= 0.5;
            if (tau <= 1e-12)
                break;
            m += tau * step;
        }
    }
    Mat2 M;
    M << m(0), m(1), m(1), m(2);
    M *= b_min;

    JohnFrame f;
    const Mat2 L = Eigen::LLT<Mat2>(M * M).matrixL();
    f.r = std::sqrt(M.determinant());
    f.A = L / f.r;

    double k = 1.0;
    for (int i = 0; i < 720; ++i) {
        const double a = std::numbers::pi * i / 360;
        const Vec2 e(std::cos(a), std::sin(a));
        k = std::max(k, support(p, shape.center, e) / (M * e).norm());
    }
    f.sandwich_constant = k;
    return f;
}

}  // namespace malab
