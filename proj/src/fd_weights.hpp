#pragma once

#include <vector>

namespace malab::detail {

/// Finite-difference weights (Fornberg) for derivatives 0..m at x0 from
/// samples at the points x. Result[d][i] multiplies f(x[i]) for the d-th
/// derivative.
inline std::vector<std::vector<double>> fd_weights(double x0, const std::vector<double>& x, int m)
{
    const int n = int(x.size());
    std::vector<std::vector<double>> c(m + 1, std::vector<double>(n, 0.0));
    double c1 = 1.0, c4 = x[0] - x0;
    c[0][0] = 1.0;
    for (int i = 1; i < n; ++i) {
        const int mn = i < m ? i : m;
        double c2 = 1.0;
        const double c5 = c4;
        c4 = x[i] - x0;
        for (int j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    c[k][i] = c1 * (k * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for (int k = mn; k >= 1; --k)
                c[k][j] = (c4 * c[k][j] - k * c[k - 1][j]) / c3;
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    return c;
}

/// Weights for the first and second derivative at each position of a
/// uniform run of length n (unit spacing), using `width`-point stencils that
/// are centred where possible and one-sided near the ends.
struct RunStencils {
    int width = 7;
    std::vector<int> start;                  // per position
    std::vector<std::vector<double>> d1, d2; // per position, width weights
};

inline RunStencils run_stencils(int n, int width = 7)
{
    RunStencils s;
    s.width = width;
    s.start.resize(n);
    s.d1.resize(n);
    s.d2.resize(n);
    for (int p = 0; p < n; ++p) {
        int st = p - width / 2;
        if (st < 0)
            st = 0;
        if (st > n - width)
            st = n - width;
        s.start[p] = st;
        std::vector<double> x(width);
        for (int q = 0; q < width; ++q)
            x[q] = st + q;
        const auto w = fd_weights(double(p), x, 2);
        s.d1[p] = w[1];
        s.d2[p] = w[2];
    }
    return s;
}

}  // namespace malab::detail
