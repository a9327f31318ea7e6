#pragma once

#include "malab/errors.hpp"
#include "malab/field.hpp"

#include <functional>
#include <string>
#include <variant>

namespace malab {

/// f(x) = c |x|^alpha.
struct PowerRhs {
    double c = 1.0;
    double alpha = 0.0;
};

using BoundaryFn = std::function<double(const Vec2&)>;

/// det D^2 u = f in the disc of the grid, u = boundary on its circle.
struct DirichletProblem {
    std::variant<PowerRhs, ScalarField> rhs;
    BoundaryFn boundary;
    DiscGrid grid;
};

struct SolverOptions {
    double tol = 1e-8;          ///< Newton stops once max update < tol h^2
    int stencil_width = 2;      ///< 1: 4 directions, 2: 8, 3: 16
    int max_iterations = 500;
    double delta = 1e-10;       ///< convexity regularization of the monotone operator
    bool verbose = false;
};

struct ConvexSolution {
    ScalarField field;
    double residual_sup = 0.0;      ///< on trusted interior nodes (>= 3h from origin and circle)
    int iterations = 0;
    double convexity_margin = 0.0;  ///< min directional second difference times h^2
    double max_update = 0.0;        ///< size of the last Newton update
};

/// Raised when damped Newton cannot reduce the residual; carries the last iterate.
class SolverDivergence : public IterationError {
public:
    SolverDivergence(const std::string& what, double residual, ScalarField last)
        : IterationError(what, residual), last_(std::move(last)) {}
    const ScalarField& last_iterate() const noexcept { return last_; }

private:
    ScalarField last_;
};

/// Monotone wide-stencil Monge-Ampere solve (minimum over orthogonal stencil
/// direction pairs of products of second differences), damped Newton,
/// started from the solution of Laplace u = 2 sqrt(f). Stencil arms that
/// leave the disc are cut at the circle and use the boundary data there.
ConvexSolution solve(const DirichletProblem& problem, const SolverOptions& opts = {});

/// sup over trusted interior nodes of |MA_h(u) - f|.
double residual(const ConvexSolution& solution, const DirichletProblem& problem,
                const SolverOptions& opts = {});

/// Right-hand side at node k. A power rhs is replaced by its exact cell
/// average at the origin node and sampled pointwise elsewhere.
double rhs_at(const DirichletProblem& problem, std::size_t k);

/// Mean of |x|^alpha over the square [-s, s]^2 (finite for alpha > -2).
double power_cell_average(double alpha, double half_width);
/// Mean of |x|^alpha over the square of half width s centred at center
/// (tensor Gauss; the square must not contain the origin).
double power_cell_average(double alpha, double half_width, const Vec2& center);

/// Parses the key-value problem format (alpha=, c=, boundary=, grid=, eps=).
/// boundary is an expression in x1, x2, r, theta (see Expression) or
/// "samples:v0,v1,..." equally spaced in theta.
DirichletProblem parse_problem(const std::string& text);
DirichletProblem load_problem(const std::string& path);

}  // namespace malab
