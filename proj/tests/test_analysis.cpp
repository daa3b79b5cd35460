#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "rbeigs/analysis.hpp"
#include "rbeigs/errors.hpp"
#include "support/oracles.hpp"

using namespace rbeigs;

namespace {

struct RandomSetup {
  SparseSymMatrix a, m;
  DenseMatrix q;  // orthonormal basis, n x r
  std::size_t n, r;
  RandomSetup(std::size_t n_, std::size_t r_, std::uint64_t seed) : n(n_), r(r_) {
    a = oracle::sparse_from_dense(oracle::random_spd(n, seed));
    m = oracle::sparse_from_dense(oracle::random_spd(n, seed + 1));
    q = qr_thin(oracle::random_symmetric(n, seed + 2).cols_slice(0, r)).q;
  }
};

ReducedBasis wrap(const DenseMatrix& q) {
  ReducedBasis b;
  b.q = q;
  b.pairs_per_param = 1;
  return b;
}

}  // namespace

TEST_CASE("rayleigh_quotient on eigenvectors and spans") {
  const DenseMatrix ad = oracle::random_symmetric(12, 21);
  const DenseMatrix md = oracle::random_spd(12, 22);
  const SparseSymMatrix a = oracle::sparse_from_dense(ad);
  const SparseSymMatrix m = oracle::sparse_from_dense(md);
  const EigenSolution es = gen_eig_dense(ad, md);
  CHECK(rayleigh_quotient(a, m, es.vectors.col(3)) ==
        doctest::Approx(es.values[3]).epsilon(1e-10));
  // x in span(phi_1, phi_2): value falls in [lambda_1, lambda_2]
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(-1, 1);
  for (int trial = 0; trial < 30; ++trial) {
    const double c1 = dist(rng), c2 = dist(rng);
    std::vector<double> x(12);
    for (std::size_t i = 0; i < 12; ++i)
      x[i] = c1 * es.vectors(i, 0) + c2 * es.vectors(i, 1);
    if (norm2(x) == 0) continue;
    const double rq = rayleigh_quotient(a, m, x);
    CHECK(rq >= es.values[0] - 1e-10);
    CHECK(rq <= es.values[1] + 1e-10);
  }
  CHECK(rayleigh_quotient(a, a, es.vectors.col(0)) == doctest::Approx(1.0));
  CHECK_THROWS_AS(rayleigh_quotient(a, m, std::vector<double>(12, 0.0)), ZeroVector);
}

TEST_CASE("oblique projector fixes its range and kills the A-complement") {
  RandomSetup s(30, 6, 100);
  const ObliqueProjectorA pa(s.q, s.a);
  // columns already in span(Q) stay put
  const DenseMatrix in_range = matmul(s.q, oracle::random_symmetric(6, 5));
  const DenseMatrix fixed = pa.apply(in_range);
  for (std::size_t i = 0; i < in_range.data().size(); ++i)
    CHECK(std::fabs(fixed.data()[i] - in_range.data()[i]) < 1e-10);

  // explicit A-orthogonal complement: z - P_A z is A-orthogonal to range(Q),
  // so P_A must send it to zero
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> dist(-1, 1);
  DenseMatrix z(30, 3);
  for (double& v : z.data()) v = dist(rng);
  const DenseMatrix pz = pa.apply(z);
  DenseMatrix complement = z;
  for (std::size_t i = 0; i < z.data().size(); ++i) complement.data()[i] -= pz.data()[i];
  const DenseMatrix killed = pa.apply(complement);
  CHECK(max_abs(killed) < 1e-9 * std::max(1.0, max_abs(z)));
}

TEST_CASE("oblique projector rejects an indefinite A") {
  RandomSetup s(15, 4, 200);
  SparseSymMatrix indefinite = s.a;
  for (double& v : indefinite.values()) v = -v;
  CHECK_THROWS_AS(ObliqueProjectorA(s.q, indefinite), NotPositiveDefinite);
}

TEST_CASE("kappa is one when the basis contains the eigenspace") {
  const std::size_t n = 24, k = 3;
  const DenseMatrix ad = oracle::random_spd(n, 31);
  const DenseMatrix md = oracle::random_spd(n, 32);
  const SparseSymMatrix a = oracle::sparse_from_dense(ad);
  const SparseSymMatrix m = oracle::sparse_from_dense(md);
  const EigenSolution es = gen_eig_dense(ad, md);
  const DenseMatrix phi_k = es.vectors.cols_slice(0, k);
  const DenseMatrix q = qr_thin(phi_k).q;
  const ObliqueProjectorA pa(q, a);
  const std::vector<KappaValue> kappa = compute_kappa(phi_k, pa, m);
  for (const KappaValue& kv : kappa) {
    REQUIRE(kv.finite);
    CHECK(kv.value == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("kappa dominates the Monte-Carlo ratio sup") {
  const std::size_t n = 30, k = 2;
  const DenseMatrix ad = oracle::random_spd(n, 41);
  const DenseMatrix md = oracle::random_spd(n, 42);
  const SparseSymMatrix a = oracle::sparse_from_dense(ad);
  const SparseSymMatrix m = oracle::sparse_from_dense(md);
  const EigenSolution es = gen_eig_dense(ad, md);
  const DenseMatrix phi_k = es.vectors.cols_slice(0, k);
  const DenseMatrix q = qr_thin(oracle::random_symmetric(n, 43).cols_slice(0, 5)).q;
  const ObliqueProjectorA pa(q, a);
  const double kappa = compute_kappa(phi_k, pa, m)[k - 1].value;
  std::mt19937_64 rng(44);
  std::uniform_real_distribution<double> dist(-1, 1);
  double best = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const double c1 = dist(rng), c2 = dist(rng);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = c1 * phi_k(i, 0) + c2 * phi_k(i, 1);
    const double num = weighted_norm(y, m);
    const double den = weighted_norm(pa.apply(y), m);
    if (den > 0) best = std::max(best, num / den);
  }
  CHECK(kappa >= best - 1e-9 * best);
}

TEST_CASE("kappa reports an infinite sentinel on rank-deficient projection") {
  // basis orthogonal to the eigenvector makes P_A Phi vanish
  DenseMatrix ad = DenseMatrix::identity(6);
  for (std::size_t i = 0; i < 6; ++i) ad(i, i) = static_cast<double>(i + 1);
  const SparseSymMatrix a = oracle::sparse_from_dense(ad);
  const SparseSymMatrix m = oracle::sparse_from_dense(DenseMatrix::identity(6));
  DenseMatrix phi(6, 1);
  phi(0, 0) = 1.0;  // first eigenvector e_0
  DenseMatrix q(6, 2);
  q(3, 0) = 1.0;
  q(5, 1) = 1.0;  // span orthogonal to e_0 (diagonal A keeps it A-orthogonal)
  const ObliqueProjectorA pa(q, a);
  const std::vector<KappaValue> kappa = compute_kappa(phi, pa, m);
  CHECK(!kappa[0].finite);
  CHECK(std::isinf(kappa[0].value));
}

TEST_CASE("partition_spectrum groups repeated values") {
  const std::vector<double> v1{1.0, 1.0, 2.0};
  const SpectralPartition p1 = partition_spectrum(v1, 1e-8);
  REQUIRE(p1.groups() == 2);
  CHECK(p1.nu[0] == 1.0);
  CHECK(p1.nu[1] == 2.0);
  CHECK(p1.gamma[0] == 2);
  CHECK(p1.gamma[1] == 1);
  CHECK(p1.cumulative[1] == 3);
  CHECK(p1.group_of[1] == 0);

  // all-distinct spectrum: singleton groups
  const std::vector<double> v2{1.0, 2.0, 3.5, 7.0};
  const SpectralPartition p2 = partition_spectrum(v2, 1e-8);
  CHECK(p2.groups() == 4);
  for (std::size_t g : p2.gamma) CHECK(g == 1);

  // fichera-style pairs (2,3), (5,6), (8,9)
  const std::vector<double> v3{13.8, 18.7, 18.7, 21.9, 24.7, 24.7, 30.3, 32.1, 32.1};
  const SpectralPartition p3 = partition_spectrum(v3, 1e-6);
  REQUIRE(p3.groups() == 6);
  CHECK(p3.gamma == std::vector<std::size_t>{1, 2, 1, 2, 1, 2});
}

TEST_CASE("compute_tau follows the gap formula") {
  SpectralPartition part;
  part.nu = {1.0};
  part.gamma = {1};
  part.cumulative = {1};
  part.group_of = {0};
  const std::vector<double> lt{1.0, 3.0};
  CHECK(compute_tau(part, 0, lt) == doctest::Approx(0.5));

  SpectralPartition part2;
  part2.nu = {2.0, 3.0};
  part2.gamma = {1, 1};
  part2.cumulative = {1, 2};
  part2.group_of = {0, 1};
  const std::vector<double> lt2{2.1, 2.5};  // nearest complement value is 2.5
  CHECK(compute_tau(part2, 0, lt2) == doctest::Approx(4.0));  // 2 / |2 - 2.5|

  // complement empty: r equals the group size
  SpectralPartition part3;
  part3.nu = {5.0};
  part3.gamma = {2};
  part3.cumulative = {2};
  part3.group_of = {0, 0};
  const std::vector<double> lt3{5.0, 5.0};
  CHECK_THROWS_AS(compute_tau(part3, 0, lt3), EmptyComplement);

  // coincident complement value: infinite sentinel
  const std::vector<double> lt4{1.0, 1.0 + 1e-15};
  CHECK(std::isinf(compute_tau(part, 0, lt4)));
}

TEST_CASE("eigvec_errors vanish when the basis contains the eigenspace") {
  const std::size_t n = 20, r = 4;
  const DenseMatrix ad = oracle::random_spd(n, 61);
  const DenseMatrix md = oracle::random_spd(n, 62);
  const SparseSymMatrix a = oracle::sparse_from_dense(ad);
  const SparseSymMatrix m = oracle::sparse_from_dense(md);
  const EigenSolution es = gen_eig_dense(ad, md);
  const DenseMatrix phi_r = es.vectors.cols_slice(0, r);
  const ReducedBasis basis = wrap(qr_thin(phi_r).q);
  const RomSolution rom = solve_reduced(project_operators(a, m, basis), basis);
  const SpectralPartition part =
      partition_spectrum(std::span<const double>(es.values.data(), r), 1e-6);
  const ObliqueProjectorA pa(basis.q, a);
  const EigvecErrors errs = eigvec_errors(phi_r, part, rom.vectors, rom.values, m, &pa);
  for (std::size_t k = 0; k < r; ++k) {
    CHECK(errs.eps[k] <= 1e-10);
    CHECK(errs.delta[k] <= 1e-10);
  }
}

TEST_CASE("eps is the best approximation in the group span") {
  RandomSetup s(25, 5, 300);
  const EigenSolution es =
      gen_eig_dense(oracle::dense_from_sparse(s.a), oracle::dense_from_sparse(s.m));
  const DenseMatrix phi = es.vectors.cols_slice(0, 3);
  const ReducedBasis basis = wrap(s.q);
  const RomSolution rom = solve_reduced(project_operators(s.a, s.m, basis), basis);
  const SpectralPartition part =
      partition_spectrum(std::span<const double>(es.values.data(), 3), 1e-6);
  const ObliqueProjectorA pa(basis.q, s.a);
  const EigvecErrors errs = eigvec_errors(phi, part, rom.vectors, rom.values, s.m, &pa);
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> dist(-1, 1);
  for (std::size_t k = 0; k < 3; ++k) {
    const auto [b, e] = part.group_range(part.group_of[k]);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> y(25, 0.0);
      for (std::size_t c = b; c < e; ++c) {
        const double w = dist(rng);
        for (std::size_t i = 0; i < 25; ++i) y[i] += w * rom.vectors(i, c);
      }
      std::vector<double> diff(25);
      for (std::size_t i = 0; i < 25; ++i) diff[i] = phi(i, k) - y[i];
      CHECK(errs.eps[k] <= weighted_norm(diff, s.m) * (1 + 1e-10));
    }
  }
}

TEST_CASE("correlation matrix of a perfect ROM is the identity up to sign") {
  const std::size_t n = 18, p = 4;
  const DenseMatrix ad = oracle::random_spd(n, 81);
  const DenseMatrix md = oracle::random_spd(n, 82);
  const SparseSymMatrix a = oracle::sparse_from_dense(ad);
  const SparseSymMatrix m = oracle::sparse_from_dense(md);
  const EigenSolution es = gen_eig_dense(ad, md);
  const DenseMatrix c = correlation_matrix(es.vectors, es.vectors, m, p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j)
      CHECK(std::fabs(std::fabs(c(i, j)) - (i == j ? 1.0 : 0.0)) < 1e-10);
}

TEST_CASE("correlation entries obey Cauchy-Schwarz and rebuild the projection") {
  RandomSetup s(22, 6, 400);
  const EigenSolution es =
      gen_eig_dense(oracle::dense_from_sparse(s.a), oracle::dense_from_sparse(s.m));
  const ReducedBasis basis = wrap(s.q);
  const RomSolution rom = solve_reduced(project_operators(s.a, s.m, basis), basis);
  const std::size_t p = 4;
  const DenseMatrix c = correlation_matrix(es.vectors, rom.vectors, s.m, p);
  for (double v : c.data()) CHECK(std::fabs(v) <= 1.0 + 1e-9);

  // reconstruction for simple eigenvalues: P~ phi_k = C_kk phi~_k
  const SpectralPartition part =
      partition_spectrum(std::span<const double>(es.values.data(), p), 1e-6);
  const EigvecErrors errs = eigvec_errors(es.vectors.cols_slice(0, p), part,
                                          rom.vectors, rom.values, s.m, nullptr);
  for (std::size_t k = 0; k < p; ++k) {
    REQUIRE(part.gamma[part.group_of[k]] == 1);
    std::vector<double> diff(s.n);
    for (std::size_t i = 0; i < s.n; ++i)
      diff[i] = es.vectors(i, k) - c(k, k) * rom.vectors(i, k);
    CHECK(weighted_norm(diff, s.m) == doctest::Approx(errs.eps[k]).epsilon(1e-10));
  }
}

TEST_CASE("verify_bounds on an exact-reproduction basis") {
  const std::size_t n = 26, r = 5;
  const DenseMatrix ad = oracle::random_spd(n, 91);
  const DenseMatrix md = oracle::random_spd(n, 92);
  const SparseSymMatrix a = oracle::sparse_from_dense(ad);
  const SparseSymMatrix m = oracle::sparse_from_dense(md);
  const EigenSolution es = gen_eig_dense(ad, md);
  EigenSolution fom;
  fom.values.assign(es.values.begin(), es.values.begin() + r + 1);
  fom.vectors = es.vectors.cols_slice(0, r + 1);
  const ReducedBasis basis = wrap(qr_thin(es.vectors.cols_slice(0, r)).q);
  const RomSolution rom = solve_reduced(project_operators(a, m, basis), basis);
  const BoundReport report = verify_bounds(a, m, fom, rom, basis, {});
  CHECK(report.all_applicable_pass());
  CHECK(report.shift_t == 0.0);  // SPD pencil needs no shift
  for (const BoundRow& row : report.rows) {
    CHECK(row.kappa == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(row.lambda_tilde == doctest::Approx(row.lambda).epsilon(1e-9));
    // lambda = lambda~ = kappa^2 lambda within slack
    CHECK(row.kappa_sq_lambda == doctest::Approx(row.lambda).epsilon(1e-7));
    CHECK(row.lower_ok == 1);
    CHECK(row.upper_ok == 1);
  }
}

TEST_CASE("verify_bounds applies the SPD shift for indefinite pencils") {
  const std::size_t n = 24, r = 4;
  DenseMatrix ad = oracle::random_spd(n, 93);
  for (std::size_t i = 0; i < n; ++i) ad(i, i) -= 3.0 * n;  // push spectrum negative
  const DenseMatrix md = oracle::random_spd(n, 94);
  const SparseSymMatrix a = oracle::sparse_from_dense(ad);
  const SparseSymMatrix m = oracle::sparse_from_dense(md);
  const EigenSolution es = gen_eig_dense(ad, md);
  REQUIRE(es.values[0] < 0.0);
  EigenSolution fom;
  fom.values.assign(es.values.begin(), es.values.begin() + r + 1);
  fom.vectors = es.vectors.cols_slice(0, r + 1);
  const ReducedBasis basis = wrap(qr_thin(es.vectors.cols_slice(0, r)).q);
  const RomSolution rom = solve_reduced(project_operators(a, m, basis), basis);
  const BoundReport report = verify_bounds(a, m, fom, rom, basis, {});
  CHECK(report.shift_t == doctest::Approx(-es.values[0] + 1.0));
  CHECK(report.all_applicable_pass());
}

TEST_CASE("bound report flag aggregation") {
  BoundReport report;
  BoundRow pass;
  pass.lower_ok = pass.upper_ok = pass.vec_ok = 1;
  BoundRow na = pass;
  na.upper_ok = na.vec_ok = -1;
  report.rows = {pass, na};
  CHECK(report.all_applicable_pass());
  CHECK(!report.any_applicable_fail());
  BoundRow fail = pass;
  fail.vec_ok = 0;
  report.rows.push_back(fail);
  CHECK(!report.all_applicable_pass());
  CHECK(report.any_applicable_fail());
}

TEST_CASE("weighted kernels reject mismatched dimensions") {
  const SparseSymMatrix eye = SparseSymMatrix::identity(4);
  const std::vector<double> short_vec{1.0, 2.0};
  CHECK_THROWS_AS(weighted_dot(short_vec, short_vec, eye), Error);
}

TEST_CASE("eigvec_errors raises GroupMismatch when the ROM splits a group") {
  // FOM says indices {0,1} are one group, but the ROM values separate widely
  SpectralPartition part;
  part.nu = {1.0};
  part.gamma = {2};
  part.cumulative = {2};
  part.group_of = {0, 0};
  const std::size_t n = 10;
  const SparseSymMatrix m = oracle::sparse_from_dense(DenseMatrix::identity(n));
  DenseMatrix phi(n, 2), phit(n, 3);
  phi(0, 0) = phi(1, 1) = 1.0;
  phit(0, 0) = phit(1, 1) = phit(2, 2) = 1.0;
  const std::vector<double> lt{1.0, 5.0, 6.0};  // spread 4 >= dist 1
  CHECK_THROWS_AS(eigvec_errors(phi, part, phit, lt, m, nullptr), GroupMismatch);
}
