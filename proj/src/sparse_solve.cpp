#include "sparse_solve.hpp"

#include "malab/errors.hpp"

#include <Eigen/UmfPackSupport>

namespace malab::detail {

Eigen::VectorXd sparse_solve(const SparseMatrix& A, const Eigen::VectorXd& b)
{
    Eigen::UmfPackLU<SparseMatrix> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success)
        throw IterationError("sparse LU factorization failed", b.lpNorm<Eigen::Infinity>());
    Eigen::VectorXd x = lu.solve(b);
    if (lu.info() != Eigen::Success || !x.allFinite())
        throw IterationError("sparse LU solve failed", b.lpNorm<Eigen::Infinity>());
    return x;
}

}  // namespace malab::detail
