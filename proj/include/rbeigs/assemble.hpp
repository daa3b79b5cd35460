#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "rbeigs/mesh.hpp"
#include "rbeigs/problem.hpp"
#include "rbeigs/sparse.hpp"

namespace rbeigs {

/// Mesh nodes to free DOF indices; Dirichlet nodes map to -1 and are
/// eliminated from the assembled system.
struct DofMap {
  std::vector<std::int64_t> node_to_free;
  std::vector<std::size_t> free_to_node;
  std::size_t n_free() const noexcept { return free_to_node.size(); }
};

struct AssembledPencil {
  SparseSymMatrix a, m;
  DofMap dofs;
};

/// Assemble the stiffness/mass pencil at parameter mu. The OpenMP version
/// computes element matrices in parallel blocks; assemble_reference is the
/// plain serial loop kept for testing. Both produce bitwise-identical output.
AssembledPencil assemble(const ParametricProblem& problem, const Mesh& mesh,
                         std::span<const double> mu);
AssembledPencil assemble_reference(const ParametricProblem& problem, const Mesh& mesh,
                                   std::span<const double> mu);

/// Parameter-independent terms of the affine decomposition together with
/// their scalar coefficient functions.
struct AffineOperators {
  std::vector<SparseSymMatrix> a_terms;
  std::vector<ThetaFn> a_thetas;
  std::vector<SparseSymMatrix> m_terms;
  std::vector<ThetaFn> m_thetas;
  DofMap dofs;

  /// Full-order A(mu), M(mu) recombined from the terms.
  std::pair<SparseSymMatrix, SparseSymMatrix> at(std::span<const double> mu) const;
};

/// Throws NoAffineForm for problems without an affine decomposition.
AffineOperators assemble_affine_terms(const ParametricProblem& problem, const Mesh& mesh);

}  // namespace rbeigs
