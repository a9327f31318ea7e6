#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace malab::detail {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplets = std::vector<Eigen::Triplet<double>>;

/// Direct LU solve (UMFPACK). Throws IterationError if the factorization fails.
Eigen::VectorXd sparse_solve(const SparseMatrix& A, const Eigen::VectorXd& b);

}  // namespace malab::detail
