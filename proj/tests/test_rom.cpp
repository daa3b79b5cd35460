#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "rbeigs/analysis.hpp"
#include "rbeigs/errors.hpp"
#include "rbeigs/rom.hpp"
#include "support/oracles.hpp"

using namespace rbeigs;

namespace {

struct SmallProblem {
  const ParametricProblem* problem;
  Mesh mesh;
  SmallProblem(const char* name, double h, int order = 1)
      : problem(&builtin_problem(name)), mesh(build_mesh(problem->mesh_for(h, order))) {}
};

ReducedBasis basis_from_q(DenseMatrix q) {
  ReducedBasis b;
  b.q = std::move(q);
  b.pairs_per_param = 1;
  return b;
}

}  // namespace

TEST_CASE("collect_snapshots stacks p columns per training point") {
  SmallProblem sp("laplace_robin_1d", 1.0 / 60.0);
  SolverOptions opts;
  opts.tol = 1e-10;
  const std::vector<std::vector<double>> train{{1.0}, {5.0}, {9.0}};
  const DenseMatrix snaps = collect_snapshots(*sp.problem, sp.mesh, train, 5, opts);
  CHECK(snaps.rows() == 59);
  CHECK(snaps.cols() == 15);

  const DenseMatrix one = collect_snapshots(*sp.problem, sp.mesh, {{2.0}}, 1, opts);
  CHECK(one.cols() == 1);
  // snapshot block is M(mu)-orthonormal
  const AssembledPencil pencil = assemble(*sp.problem, sp.mesh, train[0]);
  CHECK(oracle::m_orthonormality_defect(
            collect_snapshots(*sp.problem, sp.mesh, {train[0]}, 3, opts), pencil.m) <
        1e-9);
}

TEST_CASE("two gaussian-well snapshots give a rank-2 basis") {
  SmallProblem sp("gaussian_well_2d", 1.0 / 16.0);
  SolverOptions opts;
  opts.tol = 1e-9;
  const std::vector<std::vector<double>> train{{-2.5}, {2.5}};
  const DenseMatrix snaps = collect_snapshots(*sp.problem, sp.mesh, train, 1, opts);
  CHECK(build_basis(snaps, train, 1).rank() == 2);
}

TEST_CASE("build_basis ranks follow the snapshot content") {
  SmallProblem sp("laplace_robin_1d", 1.0 / 60.0);
  SolverOptions opts;
  opts.tol = 1e-10;
  const DenseMatrix snaps =
      collect_snapshots(*sp.problem, sp.mesh, {{1.0}, {9.0}}, 3, opts);
  const ReducedBasis basis = build_basis(snaps, {{1.0}, {9.0}}, 3);
  CHECK(basis.rank() == 6);

  // duplicated snapshot columns halve the rank
  DenseMatrix dup(snaps.rows(), 2 * snaps.cols());
  for (std::size_t i = 0; i < snaps.rows(); ++i)
    for (std::size_t j = 0; j < snaps.cols(); ++j)
      dup(i, j) = dup(i, j + snaps.cols()) = snaps(i, j);
  CHECK(build_basis(dup, {}, 3).rank() == 6);
}

TEST_CASE("project_operators with a coordinate embedding extracts the block") {
  const DenseMatrix ad = oracle::random_symmetric(8, 1);
  const DenseMatrix md = oracle::random_spd(8, 2);
  const SparseSymMatrix a = oracle::sparse_from_dense(ad);
  const SparseSymMatrix m = oracle::sparse_from_dense(md);
  DenseMatrix q(8, 3);
  for (std::size_t k = 0; k < 3; ++k) q(k, k) = 1.0;
  const ReducedOperators ops = project_operators(a, m, basis_from_q(q));
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(ops.a_hat(i, j) == doctest::Approx(ad(i, j)).epsilon(1e-14));
      CHECK(ops.m_hat(i, j) == doctest::Approx(md(i, j)).epsilon(1e-14));
    }
}

TEST_CASE("projection by exact eigenvectors diagonalizes the pencil") {
  const DenseMatrix ad = oracle::random_symmetric(10, 3);
  const DenseMatrix md = oracle::random_spd(10, 4);
  const EigenSolution es = gen_eig_dense(ad, md);
  // Euclidean-orthonormalize the first 4 eigenvectors to build Q
  const QrThin qt = qr_thin(es.vectors.cols_slice(0, 4));
  const ReducedBasis basis = basis_from_q(qt.q);
  const SparseSymMatrix a = oracle::sparse_from_dense(ad);
  const SparseSymMatrix m = oracle::sparse_from_dense(md);
  const ReducedOperators ops = project_operators(a, m, basis);
  const RomSolution rom = solve_reduced(ops, basis);
  for (std::size_t k = 0; k < 4; ++k)
    CHECK(rom.values[k] == doctest::Approx(es.values[k]).epsilon(1e-10));
  CHECK_NOTHROW(cholesky(ops.m_hat));
}

TEST_CASE("solve_reduced lifts M-orthonormal vectors") {
  SmallProblem sp("laplace_robin_1d", 1.0 / 70.0);
  SolverOptions opts;
  opts.tol = 1e-10;
  const DenseMatrix snaps =
      collect_snapshots(*sp.problem, sp.mesh, {{1.0}, {5.0}, {9.0}}, 3, opts);
  const ReducedBasis basis = build_basis(snaps, {{1.0}, {5.0}, {9.0}}, 3);
  const AssembledPencil pencil = assemble(*sp.problem, sp.mesh, std::vector<double>{3.0});
  const RomSolution rom =
      solve_reduced(project_operators(pencil.a, pencil.m, basis), basis);
  CHECK(rom.values.size() == basis.rank());  // all r pairs returned
  CHECK(oracle::m_orthonormality_defect(rom.vectors, pencil.m) < 1e-9);
  // interlacing lower bound against the FOM
  SolverOptions fopts;
  fopts.block_size = basis.rank();
  fopts.tol = 1e-10;
  const EigenSolution fom = lobpcg(pencil.a, pencil.m, fopts);
  for (std::size_t k = 0; k < basis.rank(); ++k)
    CHECK(rom.values[k] >= fom.values[k] - 1e-8 * std::fabs(fom.values[k]));
}

TEST_CASE("r = 1 reduced solve is the Rayleigh quotient of the basis vector") {
  SmallProblem sp("laplace_robin_1d", 1.0 / 50.0);
  SolverOptions opts;
  opts.tol = 1e-10;
  const DenseMatrix snaps = collect_snapshots(*sp.problem, sp.mesh, {{4.0}}, 1, opts);
  const ReducedBasis basis = build_basis(snaps, {{4.0}}, 1);
  REQUIRE(basis.rank() == 1);
  const AssembledPencil pencil = assemble(*sp.problem, sp.mesh, std::vector<double>{7.0});
  const RomSolution rom =
      solve_reduced(project_operators(pencil.a, pencil.m, basis), basis);
  const double rq = rayleigh_quotient(pencil.a, pencil.m, basis.q.col(0));
  CHECK(rom.values[0] == doctest::Approx(rq).epsilon(1e-12));
}

TEST_CASE("Rayleigh quotient pullback through the basis") {
  SmallProblem sp("laplace_robin_1d", 1.0 / 60.0);
  SolverOptions opts;
  opts.tol = 1e-10;
  const DenseMatrix snaps =
      collect_snapshots(*sp.problem, sp.mesh, {{1.0}, {9.0}}, 3, opts);
  const ReducedBasis basis = build_basis(snaps, {{1.0}, {9.0}}, 3);
  const AssembledPencil pencil = assemble(*sp.problem, sp.mesh, std::vector<double>{5.0});
  const ReducedOperators ops = project_operators(pencil.a, pencil.m, basis);
  const SparseSymMatrix a_hat_s = oracle::sparse_from_dense(ops.a_hat);
  const SparseSymMatrix m_hat_s = oracle::sparse_from_dense(ops.m_hat);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> dist(-1, 1);
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<double> xh(basis.rank());
    for (double& v : xh) v = dist(rng);
    const DenseMatrix xhm = [&] {
      DenseMatrix t(basis.rank(), 1);
      t.set_col(0, xh);
      return t;
    }();
    const std::vector<double> x = matmul(basis.q, xhm).col(0);
    const double full = rayleigh_quotient(pencil.a, pencil.m, x);
    const double red = rayleigh_quotient(a_hat_s, m_hat_s, xh);
    CHECK(std::fabs(full - red) <= 1e-12 * std::fabs(full));
  }
}

TEST_CASE("affine projection matches direct projection") {
  SmallProblem sp("laplace_robin_1d", 1.0 / 60.0);
  SolverOptions opts;
  opts.tol = 1e-10;
  const DenseMatrix snaps =
      collect_snapshots(*sp.problem, sp.mesh, {{1.0}, {5.0}, {9.0}}, 2, opts);
  const ReducedBasis basis = build_basis(snaps, {{1.0}, {5.0}, {9.0}}, 2);
  const AffineOperators full = assemble_affine_terms(*sp.problem, sp.mesh);
  const AffineReducedOperators red = project_affine(full, basis);
  for (int t = 0; t <= 40; ++t) {
    const std::vector<double> mu{0.25 * t};
    const ReducedOperators online = red.reduce_at(mu);
    const AssembledPencil pencil = assemble(*sp.problem, sp.mesh, mu);
    const ReducedOperators direct = project_operators(pencil.a, pencil.m, basis);
    CHECK(max_abs(online.a_hat) > 0);
    double dev = 0;
    for (std::size_t i = 0; i < online.a_hat.data().size(); ++i)
      dev = std::max(dev, std::fabs(online.a_hat.data()[i] - direct.a_hat.data()[i]));
    CHECK(dev <= 1e-12 * max_abs(direct.a_hat));
    if (t == 0) {
      // theta_2(0) = 0: the online operator is the first term alone
      for (std::size_t i = 0; i < online.a_hat.data().size(); ++i)
        CHECK(online.a_hat.data()[i] ==
              doctest::Approx(red.a_terms[0].data()[i]).epsilon(1e-15));
    }
  }
}

TEST_CASE("basis save/load round trip preserves provenance and bytes") {
  const DenseMatrix q = qr_thin(oracle::random_symmetric(20, 13)).q;
  ReducedBasis basis = basis_from_q(q.cols_slice(0, 5));
  basis.training_params = {{1.0, 0.5}, {2.0, 0.25}};
  basis.pairs_per_param = 3;
  const auto path = std::filesystem::temp_directory_path() / "rbeigs_basis_test.bin";
  save_basis(path, basis);
  const ReducedBasis loaded = load_basis(path);
  CHECK(loaded.pairs_per_param == 3);
  REQUIRE(loaded.training_params.size() == 2);
  CHECK(loaded.training_params[1][1] == 0.25);
  REQUIRE(loaded.q.rows() == basis.q.rows());
  REQUIRE(loaded.q.cols() == basis.q.cols());
  for (std::size_t i = 0; i < basis.q.data().size(); ++i)
    CHECK(loaded.q.data()[i] == basis.q.data()[i]);
  std::filesystem::remove(path);
}

TEST_CASE("reproduction: training-point eigenpairs come back to solver precision") {
  SmallProblem sp("harmonic_oscillator_1d", 1.0 / 10.0);
  SolverOptions opts;
  opts.tol = 1e-12;
  const std::vector<std::vector<double>> train{{1.0, 0.0}, {3.0, 1.0}};
  const DenseMatrix snaps = collect_snapshots(*sp.problem, sp.mesh, train, 4, opts);
  const ReducedBasis basis = build_basis(snaps, train, 4);
  const AssembledPencil pencil = assemble(*sp.problem, sp.mesh, train[0]);
  const RomSolution rom =
      solve_reduced(project_operators(pencil.a, pencil.m, basis), basis);
  SolverOptions fopts = opts;
  fopts.block_size = 5;
  const EigenSolution fom = lobpcg(pencil.a, pencil.m, fopts);
  for (std::size_t k = 0; k < 4; ++k)
    CHECK(std::fabs(rom.values[k] - fom.values[k]) <= 1e-9 * std::fabs(fom.values[k]));
  // eigenvector reproduction via eps
  const SpectralPartition part =
      partition_spectrum(std::span<const double>(fom.values.data(), 4), 1e-6);
  const EigvecErrors errs = eigvec_errors(fom.vectors.cols_slice(0, 4), part,
                                          rom.vectors, rom.values, pencil.m, nullptr);
  for (std::size_t k = 0; k < 4; ++k) CHECK(errs.eps[k] <= 1e-9);
}
