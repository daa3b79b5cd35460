#include "rbeigs/lobpcg.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "rbeigs/csv.hpp"
#include "rbeigs/errors.hpp"

namespace rbeigs {

namespace {

DenseMatrix random_block(std::size_t n, std::size_t m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  DenseMatrix x(n, m);
  for (double& v : x.data()) v = dist(rng);
  return x;
}

DenseMatrix hcat(const DenseMatrix& a, const DenseMatrix& b, const DenseMatrix& c) {
  const std::size_t n = a.rows();
  DenseMatrix s(n, a.cols() + b.cols() + c.cols());
  for (std::size_t i = 0; i < n; ++i) {
    double* si = s.row(i);
    std::size_t j = 0;
    for (std::size_t k = 0; k < a.cols(); ++k) si[j++] = a(i, k);
    for (std::size_t k = 0; k < b.cols(); ++k) si[j++] = b(i, k);
    for (std::size_t k = 0; k < c.cols(); ++k) si[j++] = c(i, k);
  }
  return s;
}

/// X <- X L^-T for lower-triangular L (makes X'M X = I when L L' = X'M X).
void right_apply_inv_lt(DenseMatrix& x, const DenseMatrix& l) {
  const std::size_t n = x.rows(), m = x.cols();
  for (std::size_t i = 0; i < n; ++i) {
    double* xi = x.row(i);
    for (std::size_t j = 0; j < m; ++j) {
      double s = xi[j];
      for (std::size_t k = 0; k < j; ++k) s -= l(j, k) * xi[k];
      xi[j] = s / l(j, j);
    }
  }
}

/// Column-wise modified Gram-Schmidt in the M inner product with two passes;
/// near-null columns are dropped. Returns the kept columns.
DenseMatrix mgs_m(const SparseSymMatrix& m, const DenseMatrix& x, double drop_tol) {
  const std::size_t n = x.rows();
  std::vector<std::vector<double>> kept, mkept;
  for (std::size_t j = 0; j < x.cols(); ++j) {
    std::vector<double> v = x.col(j);
    std::vector<double> mv = spmv(m, v);
    const double norm0 = std::sqrt(std::max(0.0, dot(v, mv)));
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < kept.size(); ++k) {
        const double c = dot(mkept[k], v);
        axpy(-c, kept[k], v);
      }
      mv = spmv(m, v);
    }
    const double norm1 = std::sqrt(std::max(0.0, dot(v, mv)));
    if (norm1 <= drop_tol * std::max(norm0, 1e-300)) continue;
    scale(1.0 / norm1, v);
    scale(1.0 / norm1, mv);
    kept.push_back(std::move(v));
    mkept.push_back(std::move(mv));
  }
  DenseMatrix out(n, kept.size());
  for (std::size_t j = 0; j < kept.size(); ++j) out.set_col(j, kept[j]);
  return out;
}

/// Try the cheap Gram-Cholesky M-orthonormalization; fall back to MGS.
DenseMatrix m_orthonormalize(const SparseSymMatrix& m, DenseMatrix x) {
  if (x.cols() == 0) return x;
  DenseMatrix mx = spmm(m, x);
  DenseMatrix g = matmul_at_b(x, mx);
  symmetrize(g);
  try {
    const DenseMatrix l = cholesky(g);
    right_apply_inv_lt(x, l);
    return x;
  } catch (const NotPositiveDefinite&) {
    return mgs_m(m, x, 1e-10);
  }
}

EigenSolution dense_fallback(const SparseSymMatrix& a, const SparseSymMatrix& m,
                             std::size_t p) {
  const std::size_t n = a.n();
  DenseMatrix ad(n, n), md(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k)
      ad(i, a.col_idx()[k]) = a.values()[k];
    for (std::size_t k = m.row_ptr()[i]; k < m.row_ptr()[i + 1]; ++k)
      md(i, m.col_idx()[k]) = m.values()[k];
  }
  EigenSolution full = gen_eig_dense(ad, md);
  EigenSolution out;
  out.values.assign(full.values.begin(), full.values.begin() + p);
  out.vectors = full.vectors.cols_slice(0, p);
  out.residual_norms.assign(full.residual_norms.begin(), full.residual_norms.begin() + p);
  out.metric = MetricKind::sparse;
  return out;
}

}  // namespace

EigenSolution lobpcg(const SparseSymMatrix& a, const SparseSymMatrix& m,
                     const SolverOptions& opts) {
  const std::size_t n = a.n();
  const std::size_t p = opts.block_size;
  if (p < 1 || p > n) throw Error("lobpcg: block_size out of range");
  if (!(opts.tol > 0.0)) throw Error("lobpcg: tol must be positive");
  std::size_t mblk = std::min(p + std::min<std::size_t>(p, 5), n);

  // degenerate sizes: the three-block subspace would exceed the space
  if (3 * mblk + 2 >= n) {
    EigenSolution out = dense_fallback(a, m, p);
    out.metric_sparse = &m;
    fix_column_signs(out.vectors);
    return out;
  }

  const double norm_a = a.norm1();
  const double norm_m = m.norm1();

  // Jacobi preconditioner on the diagonally shifted operator
  std::vector<double> precond(n, 1.0);
  if (opts.preconditioner == Preconditioner::jacobi) {
    const std::vector<double> da = a.diagonal();
    const std::vector<double> dm = m.diagonal();
    double t_hat = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (da[i] <= 0.0) t_hat = std::max(t_hat, -da[i] / dm[i]);
    if (t_hat > 0.0) t_hat += 1.0;
    for (std::size_t i = 0; i < n; ++i) precond[i] = 1.0 / (da[i] + t_hat * dm[i]);
  }

  DenseMatrix x = m_orthonormalize(m, random_block(n, mblk, opts.seed));
  if (x.cols() < mblk) throw Error("lobpcg: initial block lost rank");
  {
    // initial Rayleigh-Ritz rotation
    DenseMatrix ax = spmm(a, x);
    DenseMatrix mx = spmm(m, x);
    DenseMatrix ga = matmul_at_b(x, ax);
    DenseMatrix gm = matmul_at_b(x, mx);
    symmetrize(ga);
    symmetrize(gm);
    const EigenSolution ritz = gen_eig_dense(ga, gm);
    x = matmul(x, ritz.vectors);
  }
  std::vector<double> theta(mblk, 0.0);
  DenseMatrix pdir(n, 0);

  std::vector<std::vector<double>> history;
  std::vector<double> residuals(mblk, 0.0);
  bool converged = false;
  std::size_t iter = 0;

  for (; iter < opts.max_iter; ++iter) {
    DenseMatrix ax = spmm(a, x);
    DenseMatrix mx = spmm(m, x);
    if (iter == 0) {
      DenseMatrix ga = matmul_at_b(x, ax);
      DenseMatrix gm = matmul_at_b(x, mx);
      symmetrize(ga);
      symmetrize(gm);
      const EigenSolution ritz = gen_eig_dense(ga, gm);
      theta = ritz.values;
    }
    // residuals R = AX - MX diag(theta)
    DenseMatrix r = ax;
    for (std::size_t i = 0; i < n; ++i) {
      double* ri = r.row(i);
      const double* mi = mx.row(i);
      for (std::size_t k = 0; k < mblk; ++k) ri[k] -= theta[k] * mi[k];
    }
    std::vector<char> done(mblk, 0);
    bool all_p_done = true;
    for (std::size_t k = 0; k < mblk; ++k) {
      const double rn = norm2(r.col(k));
      const double xn = norm2(x.col(k));
      residuals[k] = rn / ((norm_a + std::fabs(theta[k]) * norm_m) * xn);
      done[k] = residuals[k] <= opts.tol;
      if (k < p && !done[k]) all_p_done = false;
    }
    if (!opts.history_csv.empty())
      history.emplace_back(residuals.begin(), residuals.begin() + p);
    if (all_p_done) {
      converged = true;
      break;
    }

    // W: preconditioned residuals of the unconverged columns (soft locking)
    std::size_t nw = 0;
    for (std::size_t k = 0; k < mblk; ++k)
      if (!done[k]) ++nw;
    DenseMatrix w(n, nw);
    {
      std::size_t c = 0;
      for (std::size_t k = 0; k < mblk; ++k) {
        if (done[k]) continue;
        for (std::size_t i = 0; i < n; ++i) w(i, c) = precond[i] * r(i, k);
        ++c;
      }
    }
    // M-orthogonalize W against X and P (two passes), then internally
    DenseMatrix mp = pdir.cols() ? spmm(m, pdir) : DenseMatrix(n, 0);
    for (int pass = 0; pass < 2; ++pass) {
      DenseMatrix cx = matmul_at_b(mx, w);
      for (std::size_t i = 0; i < n; ++i) {
        double* wi = w.row(i);
        const double* xi = x.row(i);
        for (std::size_t k = 0; k < mblk; ++k) {
          const double xik = xi[k];
          const double* ck = cx.row(k);
          for (std::size_t j = 0; j < w.cols(); ++j) wi[j] -= xik * ck[j];
        }
      }
      if (pdir.cols()) {
        DenseMatrix cp = matmul_at_b(mp, w);
        for (std::size_t i = 0; i < n; ++i) {
          double* wi = w.row(i);
          const double* pi = pdir.row(i);
          for (std::size_t k = 0; k < pdir.cols(); ++k) {
            const double pik = pi[k];
            const double* ck = cp.row(k);
            for (std::size_t j = 0; j < w.cols(); ++j) wi[j] -= pik * ck[j];
          }
        }
      }
    }
    w = mgs_m(m, w, 1e-8);

    // cap the subspace so [X W P] stays well inside R^n
    while (x.cols() + w.cols() + pdir.cols() + 2 > n && pdir.cols() > 0)
      pdir = pdir.cols_slice(0, pdir.cols() - 1);

    DenseMatrix s = hcat(x, w, pdir);
    DenseMatrix as = spmm(a, s);
    DenseMatrix ms = spmm(m, s);
    DenseMatrix ga = matmul_at_b(s, as);
    DenseMatrix gm = matmul_at_b(s, ms);
    symmetrize(ga);
    symmetrize(gm);

    EigenSolution ritz;
    bool ok = false;
    for (int attempt = 0; attempt < 3 && !ok; ++attempt) {
      try {
        ritz = gen_eig_dense(ga, gm);
        ok = true;
      } catch (const NotPositiveDefinite&) {
        // breakdown restart: re-orthonormalize, then drop the P block
        if (attempt == 0) {
          s = mgs_m(m, s, 1e-10);
        } else {
          pdir = DenseMatrix(n, 0);
          s = mgs_m(m, hcat(x, w, pdir), 1e-10);
        }
        as = spmm(a, s);
        ms = spmm(m, s);
        ga = matmul_at_b(s, as);
        gm = matmul_at_b(s, ms);
        symmetrize(ga);
        symmetrize(gm);
      }
    }
    if (!ok) throw NoConvergence("lobpcg: Rayleigh-Ritz breakdown", iter, residuals);

    const std::size_t take = std::min(mblk, s.cols());
    DenseMatrix yx(s.cols(), take);
    for (std::size_t i = 0; i < s.cols(); ++i)
      for (std::size_t j = 0; j < take; ++j) yx(i, j) = ritz.vectors(i, j);
    DenseMatrix xnew = matmul(s, yx);
    // implicit conjugate direction: the W/P part of the new Ritz vectors
    DenseMatrix yp = yx;
    for (std::size_t i = 0; i < x.cols() && i < yp.rows(); ++i)
      for (std::size_t j = 0; j < take; ++j) yp(i, j) = 0.0;
    DenseMatrix pnew = m_orthonormalize(m, matmul(s, yp));

    x = std::move(xnew);
    pdir = std::move(pnew);
    theta.assign(ritz.values.begin(), ritz.values.begin() + take);
    mblk = take;
    if (mblk < p) throw NoConvergence("lobpcg: block collapsed", iter, residuals);
  }

  if (!opts.history_csv.empty()) {
    CsvWriter csv(opts.history_csv);
    std::vector<std::string> hdr{"iteration"};
    for (std::size_t k = 0; k < p; ++k) hdr.push_back("residual_" + std::to_string(k + 1));
    csv.header(hdr);
    for (std::size_t it = 0; it < history.size(); ++it) {
      std::vector<std::string> row{std::to_string(it)};
      for (double v : history[it]) row.push_back(format_g17(v));
      csv.row(row);
    }
  }

  if (!converged)
    throw NoConvergence("lobpcg did not reach the residual target", iter, residuals);

  EigenSolution out;
  out.values.assign(theta.begin(), theta.begin() + p);
  out.vectors = x.cols_slice(0, p);
  fix_column_signs(out.vectors);
  out.metric = MetricKind::sparse;
  out.metric_sparse = &m;
  out.residual_norms.resize(p);
  std::vector<double> av(n), mv(n);
  for (std::size_t k = 0; k < p; ++k) {
    const std::vector<double> v = out.vectors.col(k);
    spmv(a, v, av);
    spmv(m, v, mv);
    axpy(-out.values[k], mv, av);
    out.residual_norms[k] = norm2(av);
  }
  return out;
}

SpdShift spd_shift(const SparseSymMatrix& a, const SparseSymMatrix& m,
                   double lambda1_estimate) {
  double t = std::max(0.0, -lambda1_estimate) + 1.0;
  const std::size_t n = a.n();
  const std::size_t k = std::min<std::size_t>(8, n);
  const QrThin probe = qr_thin(random_block(n, k, 0x5eed5eedULL));
  for (int attempt = 0; attempt < 64; ++attempt) {
    SparseSymMatrix shifted = sparse_add(1.0, a, t, m);
    DenseMatrix g = matmul_at_b(probe.q, spmm(shifted, probe.q));
    symmetrize(g);
    try {
      cholesky(g);
      return {t, std::move(shifted)};
    } catch (const NotPositiveDefinite&) {
      t = 2.0 * t + 1.0;  // estimate was low; widen the margin
    }
  }
  throw Error("spd_shift: could not reach positive definiteness");
}

}  // namespace rbeigs
