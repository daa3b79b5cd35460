#include "rbeigs/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rbeigs/errors.hpp"

namespace rbeigs {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}  // namespace

double rayleigh_quotient(const SparseSymMatrix& a, const SparseSymMatrix& m,
                         std::span<const double> x) {
  if (norm2(x) == 0.0) throw ZeroVector();
  const double num = weighted_dot(x, x, a);
  const double den = weighted_dot(x, x, m);
  if (den == 0.0) throw ZeroVector();
  return num / den;
}

ObliqueProjectorA::ObliqueProjectorA(const DenseMatrix& q, const SparseSymMatrix& a)
    : q_(&q), a_(&a) {
  DenseMatrix a_hat = matmul_at_b(q, spmm(a, q));
  symmetrize(a_hat);
  chol_a_hat_ = cholesky(a_hat);  // NotPositiveDefinite when A is not SPD on range(Q)
}

DenseMatrix ObliqueProjectorA::apply(const DenseMatrix& x) const {
  DenseMatrix c = matmul_at_b(*q_, spmm(*a_, x));  // Q'A X
  solve_lower_inplace(chol_a_hat_, c);
  solve_lower_transpose_inplace(chol_a_hat_, c);   // A_hat^-1 Q'A X
  return matmul(*q_, c);
}

std::vector<double> ObliqueProjectorA::apply(std::span<const double> x) const {
  DenseMatrix xm(x.size(), 1);
  for (std::size_t i = 0; i < x.size(); ++i) xm(i, 0) = x[i];
  return apply(xm).col(0);
}

SpectralPartition partition_spectrum(std::span<const double> values, double rel_tol,
                                     double abs_floor) {
  SpectralPartition p;
  p.group_of.resize(values.size());
  std::size_t start = 0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k > start &&
        std::fabs(values[k] - values[k - 1]) >
            rel_tol * std::max(std::fabs(values[k - 1]), abs_floor)) {
      p.nu.push_back(values[start]);
      p.gamma.push_back(k - start);
      p.cumulative.push_back(k);
      start = k;
    }
    p.group_of[k] = p.nu.size();
  }
  if (!values.empty()) {
    p.nu.push_back(values[start]);
    p.gamma.push_back(values.size() - start);
    p.cumulative.push_back(values.size());
  }
  return p;
}

std::vector<KappaValue> compute_kappa(const DenseMatrix& phi, const ObliqueProjectorA& pa,
                                      const SparseSymMatrix& m) {
  const std::size_t r = phi.cols();
  const DenseMatrix psi = pa.apply(phi);
  DenseMatrix g_phi = matmul_at_b(phi, spmm(m, phi));
  DenseMatrix g_psi = matmul_at_b(psi, spmm(m, psi));
  symmetrize(g_phi);
  symmetrize(g_psi);
  std::vector<KappaValue> out(r);
  for (std::size_t k = 1; k <= r; ++k) {
    DenseMatrix a_k(k, k), m_k(k, k);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) {
        a_k(i, j) = g_phi(i, j);
        m_k(i, j) = g_psi(i, j);
      }
    try {
      const EigenSolution es = gen_eig_dense(a_k, m_k);
      out[k - 1] = {std::sqrt(es.values.back()), true};
    } catch (const NotPositiveDefinite&) {
      out[k - 1] = {kInf, false};  // P_A Phi^{(k)} rank-deficient
    }
  }
  return out;
}

double compute_tau(const SpectralPartition& partition, std::size_t j,
                   std::span<const double> lambda_tilde) {
  const auto [begin, end] = partition.group_range(j);
  const std::size_t r = lambda_tilde.size();
  if (begin == 0 && end >= r) throw EmptyComplement("S_j covers every index up to r");
  const double nu = partition.nu[j];
  double gap = kInf;
  for (std::size_t k = 0; k < r; ++k) {
    if (k >= begin && k < end) continue;
    gap = std::min(gap, std::fabs(nu - lambda_tilde[k]));
  }
  if (gap <= 1e-12 * std::fabs(nu)) return kInf;  // coincident; bound vacuous
  return nu / gap;
}

namespace {

// Shared worker: mismatch diagnostics optionally collected instead of thrown.
EigvecErrors eigvec_errors_impl(const DenseMatrix& phi, const SpectralPartition& partition,
                                const DenseMatrix& phi_tilde,
                                std::span<const double> lambda_tilde,
                                const SparseSymMatrix& m, const ObliqueProjectorA* pa,
                                std::vector<bool>* group_ok) {
  const std::size_t kcount = phi.cols();
  const std::size_t r = phi_tilde.cols();
  if (group_ok) group_ok->assign(partition.groups(), true);
  for (std::size_t j = 0; j < partition.groups(); ++j) {
    const auto [begin, end] = partition.group_range(j);
    if (begin >= kcount) break;
    if (end > r) {
      if (group_ok)
        (*group_ok)[j] = false;
      else
        throw GroupMismatch("FOM group extends past the ROM block");
      continue;
    }
    const double spread = lambda_tilde[end - 1] - lambda_tilde[begin];
    double dist = kInf;
    if (begin > 0) dist = std::min(dist, lambda_tilde[begin] - lambda_tilde[begin - 1]);
    if (end < r) dist = std::min(dist, lambda_tilde[end] - lambda_tilde[end - 1]);
    if (end - begin > 1 && spread >= dist) {
      if (group_ok)
        (*group_ok)[j] = false;
      else
        throw GroupMismatch("ROM values in S_j are not mutually closer than to the complement");
    }
  }

  EigvecErrors out;
  out.eps.assign(kcount, kNaN);
  out.delta.assign(kcount, kNaN);
  const DenseMatrix psi = pa ? pa->apply(phi) : DenseMatrix();  // P_A Phi
  const DenseMatrix m_phi = spmm(m, phi);
  std::vector<double> diff(phi.rows());
  for (std::size_t k = 0; k < kcount; ++k) {
    const std::size_t j = partition.group_of[k];
    const auto [begin, end] = partition.group_range(j);
    // delta is group-independent
    if (pa) {
      for (std::size_t i = 0; i < phi.rows(); ++i) diff[i] = phi(i, k) - psi(i, k);
      out.delta[k] = weighted_norm(diff, m);
    }
    if (end > r) continue;  // no ROM counterpart; eps stays NaN
    // eps: best approximation within span(phi_tilde[S_j]) in the M norm
    for (std::size_t i = 0; i < phi.rows(); ++i) diff[i] = phi(i, k);
    for (std::size_t c = begin; c < end; ++c) {
      double coeff = 0.0;
      for (std::size_t i = 0; i < phi.rows(); ++i) coeff += phi_tilde(i, c) * m_phi(i, k);
      for (std::size_t i = 0; i < phi.rows(); ++i) diff[i] -= coeff * phi_tilde(i, c);
    }
    out.eps[k] = weighted_norm(diff, m);
  }
  return out;
}

}  // namespace

EigvecErrors eigvec_errors(const DenseMatrix& phi, const SpectralPartition& partition,
                           const DenseMatrix& phi_tilde,
                           std::span<const double> lambda_tilde,
                           const SparseSymMatrix& m, const ObliqueProjectorA* pa) {
  return eigvec_errors_impl(phi, partition, phi_tilde, lambda_tilde, m, pa, nullptr);
}

DenseMatrix correlation_matrix(const DenseMatrix& phi, const DenseMatrix& phi_tilde,
                               const SparseSymMatrix& m, std::size_t p) {
  const DenseMatrix phi_p = phi.cols_slice(0, p);
  const DenseMatrix phit_p = phi_tilde.cols_slice(0, p);
  return matmul_at_b(spmm(m, phi_p), phit_p);  // C(k, m) = phi_k' M phi~_m
}

bool BoundReport::all_applicable_pass() const {
  for (const BoundRow& r : rows) {
    if (r.lower_ok == 0 || r.upper_ok == 0 || r.vec_ok == 0) return false;
  }
  return true;
}

bool BoundReport::any_applicable_fail() const { return !all_applicable_pass(); }

BoundReport verify_bounds(const SparseSymMatrix& a, const SparseSymMatrix& m,
                          const EigenSolution& fom, const RomSolution& rom,
                          const ReducedBasis& basis, const BoundOptions& opts) {
  const std::size_t r = rom.values.size();
  if (fom.values.size() < r)
    throw Error("verify_bounds needs at least r FOM pairs");
  const bool have_extra = fom.values.size() > r;

  BoundReport report;
  report.slack = opts.slack;

  const double lambda1 = fom.values[0];
  double t = 0.0;
  switch (opts.shift) {
    case BoundOptions::Shift::automatic:
      t = lambda1 > 0.0 ? 0.0 : -lambda1 + 1.0;
      break;
    case BoundOptions::Shift::always:
      t = std::max(0.0, -lambda1) + 1.0;
      break;
    case BoundOptions::Shift::never:
      t = 0.0;
      break;
  }
  report.shift_t = t;
  const SparseSymMatrix shifted = t != 0.0 ? sparse_add(1.0, a, t, m) : a;

  const ObliqueProjectorA pa(basis.q, shifted);
  const DenseMatrix phi_r = fom.vectors.cols_slice(0, r);
  const std::vector<KappaValue> kappa = compute_kappa(phi_r, pa, m);

  // grouping reflects the unshifted physical spectrum; the last group is not
  // certified when lambda_{r+1} would fall inside it
  const SpectralPartition part =
      partition_spectrum(std::span<const double>(fom.values.data(), r),
                         opts.partition_rel_tol);
  bool last_group_truncated = !have_extra;
  if (have_extra) {
    const SpectralPartition ext =
        partition_spectrum(std::span<const double>(fom.values.data(), r + 1),
                           opts.partition_rel_tol);
    last_group_truncated = ext.group_of[r] == ext.group_of[r - 1];
  }

  std::vector<double> tau(part.groups(), kNaN);
  for (std::size_t j = 0; j < part.groups(); ++j) {
    try {
      SpectralPartition shifted_part = part;
      shifted_part.nu[j] += t;
      std::vector<double> lt_shifted(rom.values.begin(), rom.values.end());
      for (double& v : lt_shifted) v += t;
      tau[j] = compute_tau(shifted_part, j, lt_shifted);
    } catch (const EmptyComplement&) {
      tau[j] = kNaN;
    }
  }

  std::vector<bool> group_ok;
  const EigvecErrors errs = eigvec_errors_impl(phi_r, part, rom.vectors, rom.values, m,
                                               &pa, &group_ok);

  for (std::size_t k = 0; k < r; ++k) {
    BoundRow row;
    row.k = k + 1;
    row.lambda = fom.values[k];
    row.lambda_tilde = rom.values[k];
    row.kappa = kappa[k].value;
    const std::size_t j = part.group_of[k];
    const bool truncated = last_group_truncated && j + 1 == part.groups();
    row.tau = truncated ? kNaN : tau[j];  // S_j is not fully known past r
    row.eps = errs.eps[k];
    row.delta = errs.delta[k];

    const double scale = std::max({std::fabs(row.lambda), std::fabs(row.lambda_tilde), 1e-12});
    row.lower_ok = row.lambda_tilde >= row.lambda - opts.slack * scale ? 1 : 0;
    if (kappa[k].finite) {
      row.kappa_sq_lambda = row.kappa * row.kappa * (row.lambda + t) - t;
      const double ub_scale = std::max(std::fabs(row.kappa_sq_lambda), scale);
      row.upper_ok = row.lambda_tilde <= row.kappa_sq_lambda + opts.slack * ub_scale ? 1 : 0;
    } else {
      row.kappa_sq_lambda = kInf;
      row.upper_ok = -1;
    }
    const bool tau_usable = std::isfinite(row.tau);
    const bool group_usable = group_ok[j] && !truncated;
    if (tau_usable && group_usable && std::isfinite(row.eps)) {
      // eps and delta are norms of M-normalized vectors; 1e-12 absorbs the
      // roundoff floor of exact-reproduction cases
      const double rhs = (1.0 + row.tau) * row.delta;
      row.vec_ok = row.eps <= rhs * (1.0 + opts.slack) + 1e-12 ? 1 : 0;
    } else {
      row.vec_ok = -1;
    }
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace rbeigs
