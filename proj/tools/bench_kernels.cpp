// Benchmark of the OpenMP kernels against their serial reference
// implementations: FEM assembly and sparse matrix-vector products. Results
// must agree bitwise; timings are informational.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <omp.h>
#include <vector>

#include "rbeigs/assemble.hpp"
#include "rbeigs/problem.hpp"
#include "rbeigs/sparse.hpp"

using namespace rbeigs;

namespace {

double seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

bool bitwise_equal(const SparseSymMatrix& a, const SparseSymMatrix& b) {
  return a.row_ptr() == b.row_ptr() && a.col_idx() == b.col_idx() &&
         std::memcmp(a.values().data(), b.values().data(),
                     a.values().size() * sizeof(double)) == 0;
}

}  // namespace

int main(int argc, char** argv) {
  double h = 1.0 / 16.0;
  int repeats = 50;
  if (argc > 1) h = 1.0 / std::atof(argv[1]);
  if (argc > 2) repeats = std::atoi(argv[2]);

  std::printf("threads: %d\n", omp_get_max_threads());
  const ParametricProblem& problem = builtin_problem("diatomic_well_3d");
  const Mesh mesh = build_mesh(problem.mesh_for(h, 1));
  const std::vector<double> mu{1.0};

  std::printf("assembly (diatomic_well_3d, h = %g, %zu cells)\n", h, mesh.num_cells());
  double t0 = seconds();
  const AssembledPencil par = assemble(problem, mesh, mu);
  const double t_par = seconds() - t0;
  t0 = seconds();
  const AssembledPencil ser = assemble_reference(problem, mesh, mu);
  const double t_ser = seconds() - t0;
  const bool same = bitwise_equal(par.a, ser.a) && bitwise_equal(par.m, ser.m);
  std::printf("  parallel  %8.3f s\n  serial    %8.3f s\n  speedup   %8.2fx\n"
              "  bitwise identical: %s\n",
              t_par, t_ser, t_ser / t_par, same ? "yes" : "NO");

  const std::size_t n = par.a.n();
  std::vector<double> x(n), y1(n), y2(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = 1.0 / static_cast<double>(i + 1);
  std::printf("spmv (n = %zu, nnz = %zu, %d repeats)\n", n, par.a.nnz(), repeats);
  t0 = seconds();
  for (int r = 0; r < repeats; ++r) spmv(par.a, x, y1);
  const double s_par = seconds() - t0;
  t0 = seconds();
  for (int r = 0; r < repeats; ++r) spmv_reference(par.a, x, y2);
  const double s_ser = seconds() - t0;
  const bool same_v = std::memcmp(y1.data(), y2.data(), n * sizeof(double)) == 0;
  std::printf("  parallel  %8.3f s\n  serial    %8.3f s\n  speedup   %8.2fx\n"
              "  bitwise identical: %s\n",
              s_par, s_ser, s_ser / s_par, same_v ? "yes" : "NO");

  return (same && same_v) ? 0 : 1;
}
