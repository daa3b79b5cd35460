#include <doctest.h>

#include <cmath>
#include <random>

#include "rbeigs/dense.hpp"
#include "rbeigs/errors.hpp"
#include "support/oracles.hpp"

using namespace rbeigs;

TEST_CASE("cholesky identity") {
  const DenseMatrix l = cholesky(DenseMatrix::identity(3));
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) CHECK(l(i, j) == (i == j ? 1.0 : 0.0));
}

TEST_CASE("cholesky reconstructs a 2x2 SPD matrix") {
  DenseMatrix a(2, 2);
  a(0, 0) = 4;
  a(0, 1) = a(1, 0) = 2;
  a(1, 1) = 3;
  const DenseMatrix l = cholesky(a);
  CHECK(l(0, 1) == 0.0);
  const DenseMatrix back = matmul(l, transpose(l));
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      CHECK(std::fabs(back(i, j) - a(i, j)) <= 1e-12 * max_abs(a));
}

TEST_CASE("cholesky reports the failing pivot") {
  DenseMatrix a(2, 2);
  a(0, 0) = 1;
  a(0, 1) = a(1, 0) = 2;
  a(1, 1) = 1;
  try {
    cholesky(a);
    FAIL("expected NotPositiveDefinite");
  } catch (const NotPositiveDefinite& e) {
    CHECK(e.pivot() == 1);
  }
}

TEST_CASE("sym_eig_dense on a diagonal matrix") {
  DenseMatrix a(3, 3);
  a(0, 0) = 3;
  a(1, 1) = 1;
  a(2, 2) = 2;
  const EigenSolution es = sym_eig_dense(a);
  CHECK(es.values[0] == doctest::Approx(1).epsilon(1e-14));
  CHECK(es.values[1] == doctest::Approx(2).epsilon(1e-14));
  CHECK(es.values[2] == doctest::Approx(3).epsilon(1e-14));
}

TEST_CASE("sym_eig_dense on the 2x2 exchange matrix") {
  DenseMatrix a(2, 2);
  a(0, 1) = a(1, 0) = 1.0;
  const EigenSolution es = sym_eig_dense(a);
  CHECK(es.values[0] == doctest::Approx(-1).epsilon(1e-14));
  CHECK(es.values[1] == doctest::Approx(1).epsilon(1e-14));
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  // sign convention: largest-magnitude entry positive
  CHECK(std::fabs(std::fabs(es.vectors(0, 0)) - inv_sqrt2) < 1e-14);
  CHECK(es.vectors(0, 0) * es.vectors(1, 0) < 0);  // (1, -1) direction
  CHECK(es.vectors(0, 1) * es.vectors(1, 1) > 0);  // (1, 1) direction
}

TEST_CASE("sym_eig_dense matches the characteristic-polynomial oracle") {
  const DenseMatrix a = oracle::random_symmetric(8, 2024);
  const EigenSolution es = sym_eig_dense(a);
  const std::vector<double> roots = oracle::charpoly_eigenvalues(a);
  REQUIRE(roots.size() == 8);
  for (std::size_t k = 0; k < 8; ++k)
    CHECK(es.values[k] == doctest::Approx(roots[k]).epsilon(1e-9));
}

TEST_CASE("sym_eig_dense residuals and orthonormality") {
  const DenseMatrix a = oracle::random_symmetric(20, 7);
  const EigenSolution es = sym_eig_dense(a);
  const double scale = max_abs(a);
  for (std::size_t k = 0; k < 20; ++k) {
    CHECK(es.residual_norms[k] <= 1e-10 * (scale + std::fabs(es.values[k])));
    if (k) CHECK(es.values[k] >= es.values[k - 1]);
  }
  const DenseMatrix vtv = matmul_at_b(es.vectors, es.vectors);
  for (std::size_t i = 0; i < 20; ++i)
    for (std::size_t j = 0; j < 20; ++j)
      CHECK(std::fabs(vtv(i, j) - (i == j ? 1 : 0)) < 1e-12);
}

TEST_CASE("gen_eig_dense identity pencil") {
  const DenseMatrix m = oracle::random_spd(6, 99);
  const EigenSolution es = gen_eig_dense(m, m);
  for (double v : es.values) CHECK(v == doctest::Approx(1).epsilon(1e-12));
}

TEST_CASE("gen_eig_dense diagonal pencil") {
  DenseMatrix a(2, 2), m(2, 2);
  a(0, 0) = 2;
  a(1, 1) = 8;
  m(0, 0) = 1;
  m(1, 1) = 2;
  const EigenSolution es = gen_eig_dense(a, m);
  CHECK(es.values[0] == doctest::Approx(2).epsilon(1e-14));
  CHECK(es.values[1] == doctest::Approx(4).epsilon(1e-14));
}

TEST_CASE("gen_eig_dense matches an independent reduction") {
  const DenseMatrix a = oracle::random_symmetric(10, 11);
  const DenseMatrix m = oracle::random_spd(10, 12);
  const EigenSolution es = gen_eig_dense(a, m);

  // reduce explicitly: B = L^-1 A L^-T via the explicit inverse of L
  const DenseMatrix l = cholesky(m);
  DenseMatrix linv = DenseMatrix::identity(10);
  solve_lower_inplace(l, linv);
  const DenseMatrix b = matmul(matmul(linv, a), transpose(linv));
  const EigenSolution std_es = sym_eig_dense(b);
  for (std::size_t k = 0; k < 10; ++k)
    CHECK(std::fabs(es.values[k] - std_es.values[k]) <= 1e-10 * max_abs(b));

  // M-orthonormality of the generalized eigenvectors
  const DenseMatrix g = matmul_at_b(es.vectors, matmul(m, es.vectors));
  for (std::size_t i = 0; i < 10; ++i)
    for (std::size_t j = 0; j < 10; ++j)
      CHECK(std::fabs(g(i, j) - (i == j ? 1 : 0)) < 1e-10);
}

TEST_CASE("gen_eig_dense relative residual invariant") {
  const DenseMatrix a = oracle::random_symmetric(16, 31);
  const DenseMatrix m = oracle::random_spd(16, 32);
  const EigenSolution es = gen_eig_dense(a, m);
  const double na = max_abs(a), nm = max_abs(m);
  for (std::size_t k = 0; k < 16; ++k)
    CHECK(es.residual_norms[k] / (na + std::fabs(es.values[k]) * nm) <= 1e-9);
}

TEST_CASE("gen_eig_dense propagates NotPositiveDefinite from M") {
  const DenseMatrix a = oracle::random_symmetric(4, 5);
  DenseMatrix m = DenseMatrix::identity(4);
  m(3, 3) = -1.0;
  CHECK_THROWS_AS(gen_eig_dense(a, m), NotPositiveDefinite);
}

TEST_CASE("pencil of size m yields exactly m eigenvalues") {
  for (std::size_t n : {std::size_t{1}, std::size_t{2}, std::size_t{5}, std::size_t{9}}) {
    const EigenSolution es = gen_eig_dense(oracle::random_symmetric(n, 40 + n),
                                           oracle::random_spd(n, 50 + n));
    CHECK(es.values.size() == n);
  }
}

TEST_CASE("qr_thin keeps orthonormal input and is idempotent") {
  const QrThin qs = qr_thin(oracle::random_symmetric(12, 77));
  REQUIRE(qs.rank == 12);
  const QrThin again = qr_thin(qs.q);
  CHECK(again.rank == 12);
  for (std::size_t i = 0; i < 12; ++i)
    for (std::size_t j = 0; j < 12; ++j)
      CHECK(std::fabs(again.q(i, j) - qs.q(i, j)) < 1e-13);
}

TEST_CASE("qr_thin truncates an exactly dependent column") {
  DenseMatrix s(5, 2);
  for (std::size_t i = 0; i < 5; ++i) {
    s(i, 0) = static_cast<double>(i + 1);
    s(i, 1) = 2.0 * static_cast<double>(i + 1);
  }
  CHECK(qr_thin(s).rank == 1);
}

TEST_CASE("qr_thin on a random 50x6 block") {
  std::mt19937_64 rng(2718);
  std::uniform_real_distribution<double> dist(-1, 1);
  DenseMatrix s(50, 6);
  for (double& v : s.data()) v = dist(rng);
  const QrThin qs = qr_thin(s);
  REQUIRE(qs.rank == 6);
  const DenseMatrix qtq = matmul_at_b(qs.q, qs.q);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j)
      CHECK(std::fabs(qtq(i, j) - (i == j ? 1 : 0)) < 1e-12);
  // span(Q) contains span(S): ||(I - QQ')S|| <= 1e-10 ||S||
  const DenseMatrix proj = matmul(qs.q, matmul_at_b(qs.q, s));
  double defect = 0, scale = 0;
  for (std::size_t i = 0; i < s.data().size(); ++i) {
    defect = std::max(defect, std::fabs(s.data()[i] - proj.data()[i]));
    scale = std::max(scale, std::fabs(s.data()[i]));
  }
  CHECK(defect <= 1e-10 * scale);
}
