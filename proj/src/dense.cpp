#include "rbeigs/dense.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rbeigs/errors.hpp"

namespace rbeigs {

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix i(n, n);
  for (std::size_t k = 0; k < n; ++k) i(k, k) = 1.0;
  return i;
}

std::vector<double> DenseMatrix::col(std::size_t j) const {
  std::vector<double> v(rows_);
  for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
  return v;
}

void DenseMatrix::set_col(std::size_t j, std::span<const double> v) {
  for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
}

DenseMatrix DenseMatrix::cols_slice(std::size_t begin, std::size_t end) const {
  DenseMatrix out(rows_, end - begin);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = begin; j < end; ++j) out(i, j - begin) = (*this)(i, j);
  return out;
}

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

void axpy(double a, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

void scale(double a, std::span<double> x) {
  for (double& v : x) v *= a;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* ci = c.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      const double* bk = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) ci[j] += aik * bk[j];
    }
  }
  return c;
}

DenseMatrix matmul_at_b(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix c(a.cols(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* ai = a.row(i);
    const double* bi = b.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = ai[k];
      double* ck = c.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) ck[j] += aik * bi[j];
    }
  }
  return c;
}

DenseMatrix transpose(const DenseMatrix& a) {
  DenseMatrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

double symmetrize(DenseMatrix& b) {
  double dev = 0.0;
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = i + 1; j < b.cols(); ++j) {
      dev = std::max(dev, std::fabs(b(i, j) - b(j, i)));
      const double avg = 0.5 * (b(i, j) + b(j, i));
      b(i, j) = b(j, i) = avg;
    }
  return dev;
}

double max_abs(const DenseMatrix& a) {
  double m = 0.0;
  for (double v : a.data()) m = std::max(m, std::fabs(v));
  return m;
}

DenseMatrix cholesky(const DenseMatrix& a) {
  const std::size_t n = a.rows();
  DenseMatrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double s = a(j, j);
    for (std::size_t k = 0; k < j; ++k) s -= l(j, k) * l(j, k);
    if (!(s > 0.0)) throw NotPositiveDefinite(j);
    const double ljj = std::sqrt(s);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double t = a(i, j);
      for (std::size_t k = 0; k < j; ++k) t -= l(i, k) * l(j, k);
      l(i, j) = t / ljj;
    }
  }
  return l;
}

void solve_lower_inplace(const DenseMatrix& l, DenseMatrix& x) {
  const std::size_t n = l.rows(), m = x.cols();
  for (std::size_t i = 0; i < n; ++i) {
    double* xi = x.row(i);
    for (std::size_t k = 0; k < i; ++k) {
      const double lik = l(i, k);
      if (lik == 0.0) continue;
      const double* xk = x.row(k);
      for (std::size_t j = 0; j < m; ++j) xi[j] -= lik * xk[j];
    }
    const double inv = 1.0 / l(i, i);
    for (std::size_t j = 0; j < m; ++j) xi[j] *= inv;
  }
}

void solve_lower_transpose_inplace(const DenseMatrix& l, DenseMatrix& x) {
  const std::size_t n = l.rows(), m = x.cols();
  for (std::size_t ii = n; ii-- > 0;) {
    double* xi = x.row(ii);
    for (std::size_t k = ii + 1; k < n; ++k) {
      const double lki = l(k, ii);
      if (lki == 0.0) continue;
      const double* xk = x.row(k);
      for (std::size_t j = 0; j < m; ++j) xi[j] -= lki * xk[j];
    }
    const double inv = 1.0 / l(ii, ii);
    for (std::size_t j = 0; j < m; ++j) xi[j] *= inv;
  }
}

void solve_lower_inplace(const DenseMatrix& l, std::span<double> x) {
  const std::size_t n = l.rows();
  for (std::size_t i = 0; i < n; ++i) {
    double s = x[i];
    for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * x[k];
    x[i] = s / l(i, i);
  }
}

void solve_lower_transpose_inplace(const DenseMatrix& l, std::span<double> x) {
  const std::size_t n = l.rows();
  for (std::size_t ii = n; ii-- > 0;) {
    double s = x[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * x[k];
    x[ii] = s / l(ii, ii);
  }
}

namespace {

// Householder reduction of a symmetric matrix to tridiagonal form; the
// orthogonal transform accumulates in z. d gets the diagonal, e the
// subdiagonal in e[1..n-1].
void tridiagonalize(DenseMatrix& z, std::vector<double>& d, std::vector<double>& e) {
  const std::size_t n = z.rows();
  for (std::size_t i = n - 1; i >= 1; --i) {
    const std::size_t l = i - 1;
    double h = 0.0;
    if (l > 0) {
      double sc = 0.0;
      for (std::size_t k = 0; k <= l; ++k) sc += std::fabs(z(i, k));
      if (sc == 0.0) {
        e[i] = z(i, l);
      } else {
        for (std::size_t k = 0; k <= l; ++k) {
          z(i, k) /= sc;
          h += z(i, k) * z(i, k);
        }
        double f = z(i, l);
        double g = (f >= 0.0) ? -std::sqrt(h) : std::sqrt(h);
        e[i] = sc * g;
        h -= f * g;
        z(i, l) = f - g;
        f = 0.0;
        for (std::size_t j = 0; j <= l; ++j) {
          z(j, i) = z(i, j) / h;
          g = 0.0;
          for (std::size_t k = 0; k <= j; ++k) g += z(j, k) * z(i, k);
          for (std::size_t k = j + 1; k <= l; ++k) g += z(k, j) * z(i, k);
          e[j] = g / h;
          f += e[j] * z(i, j);
        }
        const double hh = f / (h + h);
        for (std::size_t j = 0; j <= l; ++j) {
          f = z(i, j);
          e[j] = g = e[j] - hh * f;
          for (std::size_t k = 0; k <= j; ++k) z(j, k) -= f * e[k] + g * z(i, k);
        }
      }
    } else {
      e[i] = z(i, l);
    }
    d[i] = h;
  }
  d[0] = 0.0;
  e[0] = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (d[i] != 0.0) {
      for (std::size_t j = 0; j < i; ++j) {
        double g = 0.0;
        for (std::size_t k = 0; k < i; ++k) g += z(i, k) * z(k, j);
        for (std::size_t k = 0; k < i; ++k) z(k, j) -= g * z(k, i);
      }
    }
    d[i] = z(i, i);
    z(i, i) = 1.0;
    for (std::size_t j = 0; j < i; ++j) z(j, i) = z(i, j) = 0.0;
  }
}

constexpr std::size_t kMaxQlSweeps = 50;

// Implicit-shift QL iteration on the tridiagonal (d, e), rotations applied
// to the columns of z.
void ql_implicit(std::vector<double>& d, std::vector<double>& e, DenseMatrix& z) {
  const std::size_t n = d.size();
  if (n <= 1) return;
  const double eps = std::numeric_limits<double>::epsilon();
  for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    std::size_t iter = 0;
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
        if (std::fabs(e[m]) <= eps * dd) break;
      }
      if (m != l) {
        if (iter++ == kMaxQlSweeps)
          throw NoConvergence("QL iteration did not converge", kMaxQlSweeps);
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        bool underflow = false;
        for (std::size_t i = m; i-- > l;) {
          double f = s * e[i];
          const double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            underflow = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          for (std::size_t k = 0; k < n; ++k) {
            f = z(k, i + 1);
            z(k, i + 1) = s * z(k, i) + c * f;
            z(k, i) = c * z(k, i) - s * f;
          }
        }
        if (underflow) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
}

void sort_pairs_ascending(std::vector<double>& values, DenseMatrix& vectors) {
  const std::size_t n = values.size();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::stable_sort(perm.begin(), perm.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> sorted(n);
  DenseMatrix v(vectors.rows(), n);
  for (std::size_t j = 0; j < n; ++j) {
    sorted[j] = values[perm[j]];
    for (std::size_t i = 0; i < vectors.rows(); ++i) v(i, j) = vectors(i, perm[j]);
  }
  values = std::move(sorted);
  vectors = std::move(v);
}

std::vector<double> pair_residuals(const DenseMatrix& a, const DenseMatrix* m,
                                   const EigenSolution& es) {
  const std::size_t n = a.rows(), p = es.values.size();
  std::vector<double> res(p);
  std::vector<double> av(n), mv(n);
  for (std::size_t k = 0; k < p; ++k) {
    const std::vector<double> v = es.vectors.col(k);
    for (std::size_t i = 0; i < n; ++i) {
      av[i] = dot(std::span<const double>(a.row(i), n), v);
      mv[i] = m ? dot(std::span<const double>(m->row(i), n), v) : v[i];
    }
    axpy(-es.values[k], mv, av);
    res[k] = norm2(av);
  }
  return res;
}

}  // namespace

void fix_column_signs(DenseMatrix& v) {
  for (std::size_t j = 0; j < v.cols(); ++j) {
    double best = 0.0;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < v.rows(); ++i) {
      const double a = std::fabs(v(i, j));
      if (a > best) {
        best = a;
        arg = i;
      }
    }
    if (best > 0.0 && v(arg, j) < 0.0)
      for (std::size_t i = 0; i < v.rows(); ++i) v(i, j) = -v(i, j);
  }
}

EigenSolution sym_eig_dense(const DenseMatrix& a) {
  const std::size_t n = a.rows();
  EigenSolution es;
  es.vectors = a;
  es.values.assign(n, 0.0);
  if (n == 0) return es;
  std::vector<double> e(n, 0.0);
  tridiagonalize(es.vectors, es.values, e);
  ql_implicit(es.values, e, es.vectors);
  sort_pairs_ascending(es.values, es.vectors);
  fix_column_signs(es.vectors);
  es.metric = MetricKind::identity;
  es.residual_norms = pair_residuals(a, nullptr, es);
  return es;
}

EigenSolution gen_eig_dense(const DenseMatrix& a, const DenseMatrix& m) {
  const DenseMatrix l = cholesky(m);
  DenseMatrix b = a;
  solve_lower_inplace(l, b);  // b = L^-1 A
  b = transpose(b);
  solve_lower_inplace(l, b);  // b = L^-1 A L^-T
  symmetrize(b);
  EigenSolution es = sym_eig_dense(b);
  solve_lower_transpose_inplace(l, es.vectors);  // Phi = L^-T V
  fix_column_signs(es.vectors);
  es.metric = MetricKind::dense;
  es.metric_dense = &m;
  es.residual_norms = pair_residuals(a, &m, es);
  return es;
}

QrThin qr_thin(const DenseMatrix& s, double rank_tol) {
  const std::size_t n = s.rows(), r0 = s.cols();
  if (n < r0) throw Error("qr_thin requires rows >= cols");
  double col_scale = 0.0;
  for (std::size_t j = 0; j < r0; ++j) col_scale = std::max(col_scale, norm2(s.col(j)));
  std::vector<std::vector<double>> q;
  q.reserve(r0);
  for (std::size_t j = 0; j < r0; ++j) {
    std::vector<double> v = s.col(j);
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& qi : q) axpy(-dot(qi, v), qi, v);
    const double rjj = norm2(v);
    if (rjj <= rank_tol * col_scale) continue;  // near-dependent column dropped
    scale(1.0 / rjj, v);
    q.push_back(std::move(v));
  }
  QrThin out;
  out.rank = q.size();
  out.q = DenseMatrix(n, q.size());
  for (std::size_t j = 0; j < q.size(); ++j) out.q.set_col(j, q[j]);
  return out;
}

}  // namespace rbeigs
