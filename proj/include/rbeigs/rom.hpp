#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "rbeigs/assemble.hpp"
#include "rbeigs/dense.hpp"
#include "rbeigs/lobpcg.hpp"
#include "rbeigs/mesh.hpp"
#include "rbeigs/problem.hpp"
#include "rbeigs/sparse.hpp"

namespace rbeigs {

/// Euclidean-orthonormal basis spanning the snapshot space, with training
/// provenance.
struct ReducedBasis {
  DenseMatrix q;  // n x r, q'q = I
  std::vector<std::vector<double>> training_params;
  std::size_t pairs_per_param = 0;
  std::size_t rank() const noexcept { return q.cols(); }
};

/// Snapshot matrix n x (p*s): column block l holds the first p eigenvectors
/// at training parameter l, M(mu_l)-orthonormal, ordered by (l, k).
/// NoConvergence failures are rethrown tagged with the offending parameter.
DenseMatrix collect_snapshots(const ParametricProblem& problem, const Mesh& mesh,
                              const std::vector<std::vector<double>>& train,
                              std::size_t p, const SolverOptions& opts);

ReducedBasis build_basis(const DenseMatrix& snapshots,
                         std::vector<std::vector<double>> training_params,
                         std::size_t pairs_per_param);

struct ReducedOperators {
  DenseMatrix a_hat, m_hat;  // r x r, symmetric, m_hat SPD
};

ReducedOperators project_operators(const SparseSymMatrix& a, const SparseSymMatrix& m,
                                   const ReducedBasis& basis);

/// Offline-projected affine terms; online assembly at a parameter costs
/// O(N r^2) with no n-dimensional work.
struct AffineReducedOperators {
  std::vector<DenseMatrix> a_terms;
  std::vector<ThetaFn> a_thetas;
  std::vector<DenseMatrix> m_terms;
  std::vector<ThetaFn> m_thetas;

  ReducedOperators reduce_at(std::span<const double> mu) const;
};

AffineReducedOperators project_affine(const AffineOperators& ops, const ReducedBasis& basis);

struct RomSolution {
  std::vector<double> values;  // all r of them, ascending
  DenseMatrix vectors_hat;     // r x r, M_hat-orthonormal
  DenseMatrix vectors;         // n x r lifted, M-orthonormal
};

/// Solve the projected pencil and lift through the basis. All r pairs are
/// returned; consumers slice what they need.
RomSolution solve_reduced(const ReducedOperators& ops, const ReducedBasis& basis);

// -- persistence --------------------------------------------------------------
// Binary layout (little-endian): magic "RBQB", u32 version, u64 n, r, p, s,
// d_mu, then s*d_mu training parameter doubles, then n*r basis doubles in
// column-major order.

void save_basis(const std::filesystem::path& path, const ReducedBasis& basis);
ReducedBasis load_basis(const std::filesystem::path& path);
void export_basis_csv(const std::filesystem::path& path, const ReducedBasis& basis);

}  // namespace rbeigs
