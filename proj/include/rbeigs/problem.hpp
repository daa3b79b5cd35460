#pragma once

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rbeigs/mesh.hpp"

namespace rbeigs {

using ScalarField =
    std::function<double(const std::array<double, 3>& x, std::span<const double> mu)>;
using ThetaFn = std::function<double(std::span<const double> mu)>;

/// One parameter-independent stiffness-like term of an affine decomposition
/// A(mu) = sum_q theta_q(mu) A_q. Null fields contribute nothing.
struct AffineTerm {
  ThetaFn theta;
  ScalarField sigma;  // conductivity weight
  ScalarField rho;    // potential weight
  ScalarField robin;  // boundary mass weight on the non-Dirichlet boundary
};

struct AffineMassTerm {
  ThetaFn theta;
  ScalarField weight;
};

/// Elliptic eigenvalue problem -div(sigma grad u) + rho u = lambda u with
/// boundary condition alpha u + beta du/dn = 0, parameterized over the box D.
struct ParametricProblem {
  std::string name;
  std::string description;
  Domain domain = Domain::interval;
  int dim = 1;
  /// Per-problem translation from the published mesh size h to a MeshSpec
  /// (node-count conventions differ between the experiments; documented at
  /// each definition).
  std::function<MeshSpec(double h, int element_order)> mesh_for;
  ScalarField sigma, rho;
  ScalarField alpha, beta;
  std::vector<std::array<double, 2>> param_box;  // D, one [lo, hi] per component
  std::size_t default_p = 1;
  bool has_affine = false;
  std::vector<AffineTerm> affine_a;
  std::vector<AffineMassTerm> affine_m;

  std::size_t param_dim() const { return param_box.size(); }
  bool contains(std::span<const double> mu) const;
};

/// Built-in problem registry. Throws ConfigError for unknown names.
const ParametricProblem& builtin_problem(const std::string& name);
std::vector<std::string> builtin_problem_names();

}  // namespace rbeigs
