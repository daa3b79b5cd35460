#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "rbeigs/dense.hpp"

namespace rbeigs {

/// Symmetric sparse matrix in CSR form storing the full (not triangular)
/// pattern. Immutable after construction; col_idx sorted within each row.
class SparseSymMatrix {
 public:
  SparseSymMatrix() = default;
  SparseSymMatrix(std::size_t n, std::vector<std::size_t> row_ptr,
                  std::vector<std::size_t> col_idx, std::vector<double> values)
      : n_(n),
        row_ptr_(std::move(row_ptr)),
        col_idx_(std::move(col_idx)),
        values_(std::move(values)) {}

  static SparseSymMatrix identity(std::size_t n);
  /// Build from unsorted (i, j, v) triplets; duplicates are summed.
  static SparseSymMatrix from_triplets(
      std::size_t n, std::span<const std::size_t> rows,
      std::span<const std::size_t> cols, std::span<const double> vals);

  std::size_t n() const noexcept { return n_; }
  std::size_t nnz() const noexcept { return values_.size(); }
  const std::vector<std::size_t>& row_ptr() const noexcept { return row_ptr_; }
  const std::vector<std::size_t>& col_idx() const noexcept { return col_idx_; }
  const std::vector<double>& values() const noexcept { return values_; }
  std::vector<double>& values() noexcept { return values_; }

  double at(std::size_t i, std::size_t j) const;  // 0 if not stored
  std::vector<double> diagonal() const;
  double norm1() const;    // max absolute row sum
  double max_abs() const;

  /// Structural and numerical symmetry check (exact entry match).
  bool is_symmetric() const;

 private:
  std::size_t n_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> col_idx_;
  std::vector<double> values_;
};

// -- kernels -----------------------------------------------------------------
// spmv/spmm parallelize over rows with OpenMP; the *_reference versions are
// the serial implementations kept for testing and benchmarking. Both produce
// bitwise-identical results (per-row accumulation order is fixed).

void spmv(const SparseSymMatrix& a, std::span<const double> x, std::span<double> y);
void spmv_reference(const SparseSymMatrix& a, std::span<const double> x,
                    std::span<double> y);
std::vector<double> spmv(const SparseSymMatrix& a, std::span<const double> x);

/// Y = A X for a dense block X (n x m).
void spmm(const SparseSymMatrix& a, const DenseMatrix& x, DenseMatrix& y);
void spmm_reference(const SparseSymMatrix& a, const DenseMatrix& x, DenseMatrix& y);
DenseMatrix spmm(const SparseSymMatrix& a, const DenseMatrix& x);

/// x' W y. Symmetric in (x, y) for symmetric W.
double weighted_dot(std::span<const double> x, std::span<const double> y,
                    const SparseSymMatrix& w);
/// sqrt(x' W x); throws NegativeNormSquared when x' W x is negative beyond
/// the roundoff slack -1e-12 ||x||^2 ||W||_1.
double weighted_norm(std::span<const double> x, const SparseSymMatrix& w);

/// alpha A + beta B for matrices over the same dimension (patterns merged).
SparseSymMatrix sparse_add(double alpha, const SparseSymMatrix& a, double beta,
                           const SparseSymMatrix& b);

// -- Matrix Market coordinate format (symmetric real, lower triangle) --------

void write_matrix_market(const std::filesystem::path& path, const SparseSymMatrix& a);
SparseSymMatrix read_matrix_market(const std::filesystem::path& path);

}  // namespace rbeigs
