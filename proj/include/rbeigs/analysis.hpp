#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "rbeigs/dense.hpp"
#include "rbeigs/rom.hpp"
#include "rbeigs/sparse.hpp"

namespace rbeigs {

/// R_{A,M}(x) = x'Ax / x'Mx. Throws ZeroVector.
double rayleigh_quotient(const SparseSymMatrix& a, const SparseSymMatrix& m,
                         std::span<const double> x);

/// Oblique projector P_A = Q (Q'AQ)^-1 Q'A onto range(Q). Requires A SPD
/// (after shift); the constructor throws NotPositiveDefinite otherwise.
/// Non-owning views of Q and A.
class ObliqueProjectorA {
 public:
  ObliqueProjectorA(const DenseMatrix& q, const SparseSymMatrix& a);
  DenseMatrix apply(const DenseMatrix& x) const;
  std::vector<double> apply(std::span<const double> x) const;

 private:
  const DenseMatrix* q_;
  const SparseSymMatrix* a_;
  DenseMatrix chol_a_hat_;
};

/// Grouping of ascending eigenvalues into distinct values nu_j with
/// multiplicities gamma_j; index set S_j is [cumulative[j-1], cumulative[j]).
struct SpectralPartition {
  std::vector<double> nu;
  std::vector<std::size_t> gamma;
  std::vector<std::size_t> cumulative;
  std::vector<std::size_t> group_of;  // eigenvalue index -> group

  std::size_t groups() const noexcept { return nu.size(); }
  std::pair<std::size_t, std::size_t> group_range(std::size_t j) const {
    return {j == 0 ? 0 : cumulative[j - 1], cumulative[j]};
  }
};

/// Consecutive values within rel_tol * max(|value|, abs_floor) share a group.
SpectralPartition partition_spectrum(std::span<const double> values, double rel_tol,
                                     double abs_floor = 1e-12);

struct KappaValue {
  double value;  // +inf when the projected block lost rank
  bool finite;
};

/// kappa_k = sqrt(largest eigenvalue of M_Phi^(k) x = lam M_Psi^(k) x) with
/// Psi = P_A Phi, for every k = 1..Phi.cols().
std::vector<KappaValue> compute_kappa(const DenseMatrix& phi, const ObliqueProjectorA& pa,
                                      const SparseSymMatrix& m);

/// tau_j = nu_j / min_{k in S_j^c} |nu_j - lambda_tilde_k| over the complement
/// within the first lambda_tilde.size() indices. Throws EmptyComplement;
/// returns +inf when some complement value coincides with nu_j.
double compute_tau(const SpectralPartition& partition, std::size_t j,
                   std::span<const double> lambda_tilde);

struct EigvecErrors {
  std::vector<double> eps;    // || (I - P~_M^{S_j}) phi_k ||_M
  std::vector<double> delta;  // || (I - P_A) phi_k ||_M
};

/// Per-eigenvector projection errors. The ROM grouping reuses the FOM
/// partition's index sets; throws GroupMismatch when ROM values inside a
/// group are not mutually closer than to the complement. A null projector
/// leaves delta as NaN (eps does not need it).
EigvecErrors eigvec_errors(const DenseMatrix& phi, const SpectralPartition& partition,
                           const DenseMatrix& phi_tilde,
                           std::span<const double> lambda_tilde,
                           const SparseSymMatrix& m, const ObliqueProjectorA* pa);

/// C_km = phi_tilde_m' M phi_k for k, m < p.
DenseMatrix correlation_matrix(const DenseMatrix& phi, const DenseMatrix& phi_tilde,
                               const SparseSymMatrix& m, std::size_t p);

struct BoundRow {
  std::size_t k = 0;  // 1-based eigenpair index
  double lambda = 0, lambda_tilde = 0;
  double kappa = 0;           // +inf sentinel when projection lost rank
  double kappa_sq_lambda = 0; // upper bound mapped back to the unshifted pencil
  double tau = 0;             // NaN = not applicable
  double eps = 0, delta = 0;
  int lower_ok = -1, upper_ok = -1, vec_ok = -1;  // 1 pass, 0 fail, -1 n/a
};

struct BoundReport {
  std::vector<BoundRow> rows;
  double shift_t = 0.0;
  double slack = 1e-8;

  bool all_applicable_pass() const;
  bool any_applicable_fail() const;
};

struct BoundOptions {
  double partition_rel_tol = 1e-6;
  double slack = 1e-8;
  enum class Shift { automatic, always, never } shift = Shift::automatic;
};

/// Certify the two-sided eigenvalue bounds and the eigenspace error bound for
/// all r ROM pairs against FOM data (r+1 pairs wanted so truncation of the
/// last group is detectable). Failures are recorded as flags, not thrown.
BoundReport verify_bounds(const SparseSymMatrix& a, const SparseSymMatrix& m,
                          const EigenSolution& fom, const RomSolution& rom,
                          const ReducedBasis& basis, const BoundOptions& opts = {});

}  // namespace rbeigs
