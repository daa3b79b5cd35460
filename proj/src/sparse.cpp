#include "rbeigs/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <tuple>

#include "rbeigs/csv.hpp"
#include "rbeigs/errors.hpp"

namespace rbeigs {

SparseSymMatrix SparseSymMatrix::identity(std::size_t n) {
  std::vector<std::size_t> rp(n + 1), ci(n);
  std::vector<double> v(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    rp[i + 1] = i + 1;
    ci[i] = i;
  }
  return SparseSymMatrix(n, std::move(rp), std::move(ci), std::move(v));
}

SparseSymMatrix SparseSymMatrix::from_triplets(std::size_t n,
                                               std::span<const std::size_t> rows,
                                               std::span<const std::size_t> cols,
                                               std::span<const double> vals) {
  std::vector<std::size_t> order(rows.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::tie(rows[a], cols[a]) < std::tie(rows[b], cols[b]);
  });
  std::vector<std::size_t> rp(n + 1, 0), ci;
  std::vector<double> v;
  ci.reserve(rows.size());
  v.reserve(rows.size());
  std::size_t pos = 0;
  for (std::size_t i = 0; i < n; ++i) {
    rp[i] = ci.size();
    while (pos < order.size() && rows[order[pos]] == i) {
      const std::size_t j = cols[order[pos]];
      double sum = 0.0;
      while (pos < order.size() && rows[order[pos]] == i && cols[order[pos]] == j) {
        sum += vals[order[pos]];
        ++pos;
      }
      ci.push_back(j);
      v.push_back(sum);
    }
  }
  rp[n] = ci.size();
  return SparseSymMatrix(n, std::move(rp), std::move(ci), std::move(v));
}

double SparseSymMatrix::at(std::size_t i, std::size_t j) const {
  for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
    if (col_idx_[k] == j) return values_[k];
  return 0.0;
}

std::vector<double> SparseSymMatrix::diagonal() const {
  std::vector<double> d(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) d[i] = at(i, i);
  return d;
}

double SparseSymMatrix::norm1() const {
  double m = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    double s = 0.0;
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += std::fabs(values_[k]);
    m = std::max(m, s);
  }
  return m;
}

double SparseSymMatrix::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::fabs(v));
  return m;
}

bool SparseSymMatrix::is_symmetric() const {
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
      if (at(col_idx_[k], i) != values_[k]) return false;
  return true;
}

void spmv_reference(const SparseSymMatrix& a, std::span<const double> x,
                    std::span<double> y) {
  const auto& rp = a.row_ptr();
  const auto& ci = a.col_idx();
  const auto& v = a.values();
  for (std::size_t i = 0; i < a.n(); ++i) {
    double s = 0.0;
    for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) s += v[k] * x[ci[k]];
    y[i] = s;
  }
}

void spmv(const SparseSymMatrix& a, std::span<const double> x, std::span<double> y) {
  const auto& rp = a.row_ptr();
  const auto& ci = a.col_idx();
  const auto& v = a.values();
  const std::int64_t n = static_cast<std::int64_t>(a.n());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) s += v[k] * x[ci[k]];
    y[i] = s;
  }
}

std::vector<double> spmv(const SparseSymMatrix& a, std::span<const double> x) {
  std::vector<double> y(a.n());
  spmv(a, x, y);
  return y;
}

void spmm_reference(const SparseSymMatrix& a, const DenseMatrix& x, DenseMatrix& y) {
  const auto& rp = a.row_ptr();
  const auto& ci = a.col_idx();
  const auto& v = a.values();
  const std::size_t m = x.cols();
  for (std::size_t i = 0; i < a.n(); ++i) {
    double* yi = y.row(i);
    std::fill(yi, yi + m, 0.0);
    for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) {
      const double aij = v[k];
      const double* xj = x.row(ci[k]);
      for (std::size_t c = 0; c < m; ++c) yi[c] += aij * xj[c];
    }
  }
}

void spmm(const SparseSymMatrix& a, const DenseMatrix& x, DenseMatrix& y) {
  const auto& rp = a.row_ptr();
  const auto& ci = a.col_idx();
  const auto& v = a.values();
  const std::size_t m = x.cols();
  const std::int64_t n = static_cast<std::int64_t>(a.n());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    double* yi = y.row(i);
    std::fill(yi, yi + m, 0.0);
    for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) {
      const double aij = v[k];
      const double* xj = x.row(ci[k]);
      for (std::size_t c = 0; c < m; ++c) yi[c] += aij * xj[c];
    }
  }
}

DenseMatrix spmm(const SparseSymMatrix& a, const DenseMatrix& x) {
  DenseMatrix y(a.n(), x.cols());
  spmm(a, x, y);
  return y;
}

double weighted_dot(std::span<const double> x, std::span<const double> y,
                    const SparseSymMatrix& w) {
  if (x.size() != w.n() || y.size() != w.n())
    throw Error("weighted_dot: dimension mismatch");
  std::vector<double> wy(w.n());
  spmv(w, y, wy);
  return dot(x, wy);
}

double weighted_norm(std::span<const double> x, const SparseSymMatrix& w) {
  const double q = weighted_dot(x, x, w);
  if (q < 0.0) {
    const double xx = dot(x, x);
    if (q < -1e-12 * xx * w.norm1()) throw NegativeNormSquared(q);
    return 0.0;
  }
  return std::sqrt(q);
}

SparseSymMatrix sparse_add(double alpha, const SparseSymMatrix& a, double beta,
                           const SparseSymMatrix& b) {
  const std::size_t n = a.n();
  std::vector<std::size_t> rp(n + 1, 0), ci;
  std::vector<double> v;
  ci.reserve(std::max(a.nnz(), b.nnz()));
  v.reserve(std::max(a.nnz(), b.nnz()));
  for (std::size_t i = 0; i < n; ++i) {
    rp[i] = ci.size();
    std::size_t ka = a.row_ptr()[i], kb = b.row_ptr()[i];
    const std::size_t ea = a.row_ptr()[i + 1], eb = b.row_ptr()[i + 1];
    while (ka < ea || kb < eb) {
      std::size_t ja = ka < ea ? a.col_idx()[ka] : SIZE_MAX;
      std::size_t jb = kb < eb ? b.col_idx()[kb] : SIZE_MAX;
      if (ja == jb) {
        ci.push_back(ja);
        v.push_back(alpha * a.values()[ka] + beta * b.values()[kb]);
        ++ka;
        ++kb;
      } else if (ja < jb) {
        ci.push_back(ja);
        v.push_back(alpha * a.values()[ka]);
        ++ka;
      } else {
        ci.push_back(jb);
        v.push_back(beta * b.values()[kb]);
        ++kb;
      }
    }
  }
  rp[n] = ci.size();
  return SparseSymMatrix(n, std::move(rp), std::move(ci), std::move(v));
}

void write_matrix_market(const std::filesystem::path& path, const SparseSymMatrix& a) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  // symmetric storage: lower triangle (i >= j) only
  std::size_t count = 0;
  for (std::size_t i = 0; i < a.n(); ++i)
    for (std::size_t k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k)
      if (a.col_idx()[k] <= i) ++count;
  out << "%%MatrixMarket matrix coordinate real symmetric\n";
  out << a.n() << ' ' << a.n() << ' ' << count << '\n';
  for (std::size_t i = 0; i < a.n(); ++i)
    for (std::size_t k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k)
      if (a.col_idx()[k] <= i)
        out << (i + 1) << ' ' << (a.col_idx()[k] + 1) << ' '
            << format_g17(a.values()[k]) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

SparseSymMatrix read_matrix_market(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty file: " + path.string());
  std::istringstream banner(line);
  std::string tag, object, fmt, field, symmetry;
  banner >> tag >> object >> fmt >> field >> symmetry;
  if (tag != "%%MatrixMarket" || object != "matrix" || fmt != "coordinate" ||
      field != "real" || symmetry != "symmetric")
    throw IoError("unsupported Matrix Market banner: " + line);
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '%') break;
  std::istringstream hdr(line);
  std::size_t rows = 0, cols = 0, nnz = 0;
  hdr >> rows >> cols >> nnz;
  if (rows != cols) throw IoError("matrix is not square: " + path.string());
  std::vector<std::size_t> ti, tj;
  std::vector<double> tv;
  ti.reserve(2 * nnz);
  tj.reserve(2 * nnz);
  tv.reserve(2 * nnz);
  for (std::size_t k = 0; k < nnz; ++k) {
    std::size_t i = 0, j = 0;
    double v = 0.0;
    if (!(in >> i >> j >> v)) throw IoError("truncated entries: " + path.string());
    --i;
    --j;
    ti.push_back(i);
    tj.push_back(j);
    tv.push_back(v);
    if (i != j) {  // mirror to the full pattern
      ti.push_back(j);
      tj.push_back(i);
      tv.push_back(v);
    }
  }
  return SparseSymMatrix::from_triplets(rows, ti, tj, tv);
}

}  // namespace rbeigs
