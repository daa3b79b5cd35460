#pragma once

#include <cstdint>
#include <string>

#include "rbeigs/dense.hpp"
#include "rbeigs/sparse.hpp"

namespace rbeigs {

enum class Preconditioner { none, jacobi };

struct SolverOptions {
  std::size_t block_size = 1;  // requested eigenpairs p
  double tol = 1e-10;          // relative residual target
  std::size_t max_iter = 1500;
  Preconditioner preconditioner = Preconditioner::jacobi;
  std::uint64_t seed = 12345;
  std::string history_csv;  // convergence history CSV path; empty disables
};

/// Lowest block_size eigenpairs of the pencil (A, M) by locally optimal
/// block preconditioned conjugate gradient iteration with soft locking and
/// p + min(p, 5) guard vectors (extras discarded). Vectors returned
/// M-orthonormal, values ascending. Throws NoConvergence with the last
/// residuals when max_iter is exhausted.
EigenSolution lobpcg(const SparseSymMatrix& a, const SparseSymMatrix& m,
                     const SolverOptions& opts);

struct SpdShift {
  double t;
  SparseSymMatrix shifted;  // A + t M
};

/// Shift making the pencil positive definite: t = max(0, -lambda1) + 1,
/// verified by a Cholesky probe on a small random projection.
SpdShift spd_shift(const SparseSymMatrix& a, const SparseSymMatrix& m,
                   double lambda1_estimate);

}  // namespace rbeigs
