#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace rbeigs {

class SparseSymMatrix;

/// Row-major dense real matrix.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double value = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, value) {}

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  double* row(std::size_t i) { return data_.data() + i * cols_; }
  const double* row(std::size_t i) const { return data_.data() + i * cols_; }

  std::vector<double>& data() noexcept { return data_; }
  const std::vector<double>& data() const noexcept { return data_; }

  std::vector<double> col(std::size_t j) const;
  void set_col(std::size_t j, std::span<const double> v);

  /// Columns [begin, end) as a new matrix.
  DenseMatrix cols_slice(std::size_t begin, std::size_t end) const;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

// -- vector helpers ----------------------------------------------------------

double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);
void axpy(double a, std::span<const double> x, std::span<double> y);  // y += a x
void scale(double a, std::span<double> x);

// -- dense kernels -----------------------------------------------------------

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
/// A' * B without forming the transpose.
DenseMatrix matmul_at_b(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix transpose(const DenseMatrix& a);
/// (B + B')/2 in place; returns the max absolute deviation |B - B'| seen.
double symmetrize(DenseMatrix& b);
double max_abs(const DenseMatrix& a);

/// Lower-triangular Cholesky factor L with L L' = A.
/// Throws NotPositiveDefinite(pivot) on a non-positive pivot.
DenseMatrix cholesky(const DenseMatrix& a);

/// X <- L^-1 X (forward substitution on every column).
void solve_lower_inplace(const DenseMatrix& l, DenseMatrix& x);
/// X <- L^-T X (backward substitution on every column).
void solve_lower_transpose_inplace(const DenseMatrix& l, DenseMatrix& x);
void solve_lower_inplace(const DenseMatrix& l, std::span<double> x);
void solve_lower_transpose_inplace(const DenseMatrix& l, std::span<double> x);

/// Which metric the eigenvector block is orthonormal against.
enum class MetricKind { identity, dense, sparse };

/// Eigenpairs of a symmetric (generalized) problem, values ascending,
/// eigenvector columns orthonormal in the stated metric. The metric pointers
/// are non-owning views of the caller's matrices.
struct EigenSolution {
  std::vector<double> values;
  DenseMatrix vectors;  // columns are eigenvectors
  MetricKind metric = MetricKind::identity;
  const DenseMatrix* metric_dense = nullptr;
  const SparseSymMatrix* metric_sparse = nullptr;
  std::vector<double> residual_norms;  // per pair ||A phi - lambda M phi||_2
};

/// Symmetric dense eigendecomposition: Householder tridiagonalization then
/// implicit-shift QL sweeps. Throws NoConvergence if a value needs more than
/// 50 sweeps.
EigenSolution sym_eig_dense(const DenseMatrix& a);

/// Generalized symmetric eigendecomposition A Phi = M Phi Lambda with M SPD,
/// via M = L L' reduction to a standard problem. Phi' M Phi = I.
EigenSolution gen_eig_dense(const DenseMatrix& a, const DenseMatrix& m);

struct QrThin {
  DenseMatrix q;     // n x rank, orthonormal columns
  std::size_t rank;  // effective numerical rank
};

/// Thin QR with rank truncation: column j is dropped when its residual norm
/// falls below rank_tol times the largest column scale.
QrThin qr_thin(const DenseMatrix& s, double rank_tol = 1e-12);

/// Scale each column so its entry of largest magnitude is positive.
void fix_column_signs(DenseMatrix& v);

}  // namespace rbeigs
