#include "rbeigs/rom.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "rbeigs/csv.hpp"
#include "rbeigs/errors.hpp"

namespace rbeigs {

DenseMatrix collect_snapshots(const ParametricProblem& problem, const Mesh& mesh,
                              const std::vector<std::vector<double>>& train,
                              std::size_t p, const SolverOptions& opts) {
  if (train.empty()) throw ConfigError("empty training set");
  const std::size_t s = train.size();
  std::vector<EigenSolution> solutions(s);
  std::vector<std::string> failures(s);
  std::vector<std::pair<std::size_t, std::vector<double>>> failure_data(s);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t l = 0; l < static_cast<std::int64_t>(s); ++l) {
    try {
      const AssembledPencil pencil = assemble(problem, mesh, train[l]);
      SolverOptions o = opts;
      o.block_size = p;
      solutions[l] = lobpcg(pencil.a, pencil.m, o);
      solutions[l].metric_sparse = nullptr;
    } catch (const NoConvergence& e) {
      failures[l] = e.what();
      failure_data[l] = {e.iterations(), e.residuals()};
    } catch (const std::exception& e) {
      failures[l] = e.what();
    }
  }
  for (std::size_t l = 0; l < s; ++l) {
    if (failures[l].empty()) continue;
    std::ostringstream what;
    what << "training solve failed at mu = (";
    for (std::size_t i = 0; i < train[l].size(); ++i)
      what << (i ? ", " : "") << train[l][i];
    what << "): " << failures[l];
    throw NoConvergence(what.str(), failure_data[l].first, failure_data[l].second);
  }
  DenseMatrix snapshots(solutions[0].vectors.rows(), p * s);
  for (std::size_t l = 0; l < s; ++l)
    for (std::size_t k = 0; k < p; ++k)
      for (std::size_t i = 0; i < snapshots.rows(); ++i)
        snapshots(i, l * p + k) = solutions[l].vectors(i, k);
  return snapshots;
}

ReducedBasis build_basis(const DenseMatrix& snapshots,
                         std::vector<std::vector<double>> training_params,
                         std::size_t pairs_per_param) {
  if (max_abs(snapshots) == 0.0) throw Error("zero snapshot matrix");
  QrThin qr = qr_thin(snapshots);
  ReducedBasis basis;
  basis.q = std::move(qr.q);
  basis.training_params = std::move(training_params);
  basis.pairs_per_param = pairs_per_param;
  return basis;
}

ReducedOperators project_operators(const SparseSymMatrix& a, const SparseSymMatrix& m,
                                   const ReducedBasis& basis) {
  ReducedOperators ops;
  ops.a_hat = matmul_at_b(basis.q, spmm(a, basis.q));
  ops.m_hat = matmul_at_b(basis.q, spmm(m, basis.q));
  symmetrize(ops.a_hat);
  symmetrize(ops.m_hat);
  return ops;
}

ReducedOperators AffineReducedOperators::reduce_at(std::span<const double> mu) const {
  const std::size_t r = a_terms[0].rows();
  ReducedOperators ops{DenseMatrix(r, r), DenseMatrix(r, r)};
  for (std::size_t q = 0; q < a_terms.size(); ++q) {
    const double t = a_thetas[q](mu);
    for (std::size_t i = 0; i < r * r; ++i) ops.a_hat.data()[i] += t * a_terms[q].data()[i];
  }
  for (std::size_t q = 0; q < m_terms.size(); ++q) {
    const double t = m_thetas[q](mu);
    for (std::size_t i = 0; i < r * r; ++i) ops.m_hat.data()[i] += t * m_terms[q].data()[i];
  }
  return ops;
}

AffineReducedOperators project_affine(const AffineOperators& ops, const ReducedBasis& basis) {
  AffineReducedOperators red;
  for (std::size_t q = 0; q < ops.a_terms.size(); ++q) {
    DenseMatrix t = matmul_at_b(basis.q, spmm(ops.a_terms[q], basis.q));
    symmetrize(t);
    red.a_terms.push_back(std::move(t));
    red.a_thetas.push_back(ops.a_thetas[q]);
  }
  for (std::size_t q = 0; q < ops.m_terms.size(); ++q) {
    DenseMatrix t = matmul_at_b(basis.q, spmm(ops.m_terms[q], basis.q));
    symmetrize(t);
    red.m_terms.push_back(std::move(t));
    red.m_thetas.push_back(ops.m_thetas[q]);
  }
  return red;
}

RomSolution solve_reduced(const ReducedOperators& ops, const ReducedBasis& basis) {
  const EigenSolution es = gen_eig_dense(ops.a_hat, ops.m_hat);
  RomSolution sol;
  sol.values = es.values;
  sol.vectors_hat = es.vectors;
  sol.vectors = matmul(basis.q, es.vectors);
  fix_column_signs(sol.vectors);
  return sol;
}

namespace {

void put_u32(std::ofstream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void put_u64(std::ofstream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void put_f64(std::ofstream& out, double v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}
std::uint32_t get_u32(std::ifstream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}
std::uint64_t get_u64(std::ifstream& in) {
  std::uint64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}
double get_f64(std::ifstream& in) {
  double v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}

constexpr char kMagic[4] = {'R', 'B', 'Q', 'B'};

}  // namespace

void save_basis(const std::filesystem::path& path, const ReducedBasis& basis) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(kMagic, 4);
  put_u32(out, 1);
  const std::size_t n = basis.q.rows(), r = basis.q.cols();
  const std::size_t s = basis.training_params.size();
  const std::size_t d = s ? basis.training_params[0].size() : 0;
  put_u64(out, n);
  put_u64(out, r);
  put_u64(out, basis.pairs_per_param);
  put_u64(out, s);
  put_u64(out, d);
  for (const auto& mu : basis.training_params)
    for (double v : mu) put_f64(out, v);
  for (std::size_t j = 0; j < r; ++j)
    for (std::size_t i = 0; i < n; ++i) put_f64(out, basis.q(i, j));
  if (!out) throw IoError("write failed: " + path.string());
}

ReducedBasis load_basis(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0) throw IoError("not a basis file: " + path.string());
  const std::uint32_t version = get_u32(in);
  if (version != 1) throw IoError("unsupported basis file version");
  const std::uint64_t n = get_u64(in);
  const std::uint64_t r = get_u64(in);
  ReducedBasis basis;
  basis.pairs_per_param = get_u64(in);
  const std::uint64_t s = get_u64(in);
  const std::uint64_t d = get_u64(in);
  basis.training_params.resize(s);
  for (auto& mu : basis.training_params) {
    mu.resize(d);
    for (double& v : mu) v = get_f64(in);
  }
  basis.q = DenseMatrix(n, r);
  for (std::size_t j = 0; j < r; ++j)
    for (std::size_t i = 0; i < n; ++i) basis.q(i, j) = get_f64(in);
  if (!in) throw IoError("truncated basis file: " + path.string());
  return basis;
}

void export_basis_csv(const std::filesystem::path& path, const ReducedBasis& basis) {
  write_dense_csv(path, basis.q);
}

}  // namespace rbeigs
