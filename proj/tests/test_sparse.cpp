#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <random>

#include "rbeigs/errors.hpp"
#include "rbeigs/sparse.hpp"
#include "support/oracles.hpp"

using namespace rbeigs;

namespace {

SparseSymMatrix random_sparse_sym(std::size_t n, std::uint64_t seed) {
  return oracle::sparse_from_dense(oracle::random_symmetric(n, seed));
}

}  // namespace

TEST_CASE("from_triplets merges duplicates and sorts columns") {
  const std::vector<std::size_t> rows{1, 0, 1, 1, 0};
  const std::vector<std::size_t> cols{0, 1, 0, 1, 1};
  const std::vector<double> vals{2.0, 3.0, 1.0, 5.0, 0.5};
  const SparseSymMatrix a = SparseSymMatrix::from_triplets(2, rows, cols, vals);
  CHECK(a.nnz() == 3);
  CHECK(a.at(1, 0) == 3.0);
  CHECK(a.at(0, 1) == 3.5);
  CHECK(a.at(1, 1) == 5.0);
  CHECK(a.at(0, 0) == 0.0);
}

TEST_CASE("spmv equals the serial reference bitwise") {
  const SparseSymMatrix a = random_sparse_sym(60, 3);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> dist(-1, 1);
  std::vector<double> x(60), y1(60), y2(60);
  for (double& v : x) v = dist(rng);
  spmv(a, x, y1);
  spmv_reference(a, x, y2);
  CHECK(std::memcmp(y1.data(), y2.data(), 60 * sizeof(double)) == 0);

  DenseMatrix xb(60, 7);
  for (double& v : xb.data()) v = dist(rng);
  DenseMatrix yb1(60, 7), yb2(60, 7);
  spmm(a, xb, yb1);
  spmm_reference(a, xb, yb2);
  CHECK(std::memcmp(yb1.data().data(), yb2.data().data(), 60 * 7 * sizeof(double)) == 0);
}

TEST_CASE("weighted_dot basics") {
  const SparseSymMatrix eye = SparseSymMatrix::identity(5);
  const std::vector<double> zero(5, 0.0);
  std::vector<double> x{1, 2, 3, 4, 5}, y{2, 0, -1, 1, 3};
  CHECK(weighted_dot(zero, zero, eye) == 0.0);
  CHECK(weighted_dot(x, y, eye) == doctest::Approx(dot(x, y)).epsilon(1e-15));
  CHECK(weighted_norm(x, eye) == doctest::Approx(norm2(x)).epsilon(1e-15));
}

TEST_CASE("weighted_dot symmetry and Cauchy-Schwarz on random triples") {
  const SparseSymMatrix w = oracle::sparse_from_dense(oracle::random_spd(30, 17));
  std::mt19937_64 rng(18);
  std::uniform_real_distribution<double> dist(-1, 1);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x(30), y(30);
    for (double& v : x) v = dist(rng);
    for (double& v : y) v = dist(rng);
    const double xy = weighted_dot(x, y, w);
    const double yx = weighted_dot(y, x, w);
    CHECK(std::fabs(xy - yx) <= 1e-12 * (1.0 + std::fabs(xy)));
    CHECK(std::fabs(xy) <= weighted_norm(x, w) * weighted_norm(y, w) * (1 + 1e-12));
  }
}

TEST_CASE("weighted_norm flags an indefinite weight") {
  DenseMatrix w(2, 2);
  w(0, 0) = 1;
  w(1, 1) = -4;
  const SparseSymMatrix ws = oracle::sparse_from_dense(w);
  const std::vector<double> x{0.0, 1.0};
  CHECK_THROWS_AS(weighted_norm(x, ws), NegativeNormSquared);
}

TEST_CASE("sparse_add merges patterns") {
  const SparseSymMatrix a = SparseSymMatrix::identity(3);
  DenseMatrix bd(3, 3);
  bd(0, 1) = bd(1, 0) = 2.0;
  const SparseSymMatrix b = oracle::sparse_from_dense(bd);
  const SparseSymMatrix c = sparse_add(2.0, a, 0.5, b);
  CHECK(c.at(0, 0) == 2.0);
  CHECK(c.at(0, 1) == 1.0);
  CHECK(c.at(1, 0) == 1.0);
  CHECK(c.is_symmetric());
}

TEST_CASE("matrix market round trip") {
  const SparseSymMatrix a = random_sparse_sym(25, 42);
  const auto path = std::filesystem::temp_directory_path() / "rbeigs_mm_test.mtx";
  write_matrix_market(path, a);
  const SparseSymMatrix b = read_matrix_market(path);
  REQUIRE(b.n() == a.n());
  REQUIRE(b.nnz() == a.nnz());
  CHECK(b.row_ptr() == a.row_ptr());
  CHECK(b.col_idx() == a.col_idx());
  for (std::size_t k = 0; k < a.nnz(); ++k) CHECK(b.values()[k] == a.values()[k]);
  std::filesystem::remove(path);
}

TEST_CASE("norm1 and max_abs") {
  DenseMatrix d(2, 2);
  d(0, 0) = 3;
  d(0, 1) = d(1, 0) = -4;
  d(1, 1) = 1;
  const SparseSymMatrix a = oracle::sparse_from_dense(d);
  CHECK(a.norm1() == 7.0);
  CHECK(a.max_abs() == 4.0);
}
