#include "rbeigs/assemble.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>

#include "rbeigs/errors.hpp"

namespace rbeigs {

namespace {

struct GaussRule {
  std::vector<double> x, w;  // on [0, 1]
};

// Gauss-Legendre nodes on [-1,1], mapped to [0,1]. Order 2g-1 exactness.
GaussRule gauss_rule(int g) {
  static const double n3[] = {-0.77459666924148337704, 0.0, 0.77459666924148337704};
  static const double w3[] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  static const double n4[] = {-0.86113631159405257522, -0.33998104358485626480,
                              0.33998104358485626480, 0.86113631159405257522};
  static const double w4[] = {0.34785484513745385737, 0.65214515486254614263,
                              0.65214515486254614263, 0.34785484513745385737};
  GaussRule r;
  const double* nodes = nullptr;
  const double* weights = nullptr;
  switch (g) {
    case 3: nodes = n3; weights = w3; break;
    case 4: nodes = n4; weights = w4; break;
    default: throw Error("unsupported quadrature order");
  }
  for (int i = 0; i < g; ++i) {
    r.x.push_back(0.5 * (nodes[i] + 1.0));
    r.w.push_back(0.5 * weights[i]);
  }
  return r;
}

// 1D Lagrange shape values/derivatives at the quadrature points of one axis.
struct ShapeTable {
  int nfn;                      // order + 1
  int npt;                      // quadrature points
  std::vector<double> val, der; // [pt * nfn + fn], derivative w.r.t. xi in [0,1]
};

ShapeTable make_shape_table(int order, const GaussRule& rule) {
  ShapeTable t;
  t.nfn = order + 1;
  t.npt = static_cast<int>(rule.x.size());
  t.val.resize(t.npt * t.nfn);
  t.der.resize(t.npt * t.nfn);
  for (int p = 0; p < t.npt; ++p) {
    const double xi = rule.x[p];
    if (order == 1) {
      t.val[p * 2 + 0] = 1.0 - xi;
      t.val[p * 2 + 1] = xi;
      t.der[p * 2 + 0] = -1.0;
      t.der[p * 2 + 1] = 1.0;
    } else {
      t.val[p * 3 + 0] = 2.0 * xi * xi - 3.0 * xi + 1.0;
      t.val[p * 3 + 1] = -4.0 * xi * xi + 4.0 * xi;
      t.val[p * 3 + 2] = 2.0 * xi * xi - xi;
      t.der[p * 3 + 0] = 4.0 * xi - 3.0;
      t.der[p * 3 + 1] = -8.0 * xi + 4.0;
      t.der[p * 3 + 2] = 4.0 * xi - 1.0;
    }
  }
  return t;
}

using BoundField = std::function<double(const std::array<double, 3>&)>;

BoundField bind_field(const ScalarField& f, std::vector<double> mu) {
  if (!f) return nullptr;
  return [f, mu = std::move(mu)](const std::array<double, 3>& x) {
    return f(x, std::span<const double>(mu));
  };
}

double checked_eval(const BoundField& f, const std::array<double, 3>& x) {
  const double v = f(x);
  if (!std::isfinite(v)) throw QuadratureDomainError("coefficient not finite at quadrature point");
  return v;
}

struct FacetClass {
  std::vector<std::size_t> robin;  // facet indices carrying the Robin term
};

// Dirichlet nodes are those where beta vanishes on an incident boundary
// facet; a facet contributes the Robin term when beta is nonzero at its
// center.
std::pair<DofMap, FacetClass> classify_dofs(const Mesh& mesh, const BoundField& alpha,
                                            const BoundField& beta) {
  std::vector<char> constrained(mesh.num_nodes(), 0);
  FacetClass fc;
  std::vector<std::size_t> fnodes(mesh.nodes_per_facet());
  const auto& facets = mesh.boundary_facets();
  for (std::size_t fi = 0; fi < facets.size(); ++fi) {
    mesh.facet_nodes(facets[fi], fnodes);
    bool any_free = false;
    for (std::size_t node : fnodes) {
      const double b = beta(mesh.node_coord(node));
      if (b == 0.0) {
        const double a = alpha(mesh.node_coord(node));
        if (a == 0.0)
          throw QuadratureDomainError("alpha and beta both vanish on the boundary");
        constrained[node] = 1;
      } else {
        any_free = true;
      }
    }
    if (any_free) fc.robin.push_back(fi);
  }
  DofMap dofs;
  dofs.node_to_free.assign(mesh.num_nodes(), -1);
  for (std::size_t i = 0; i < mesh.num_nodes(); ++i)
    if (!constrained[i]) {
      dofs.node_to_free[i] = static_cast<std::int64_t>(dofs.free_to_node.size());
      dofs.free_to_node.push_back(i);
    }
  return {std::move(dofs), std::move(fc)};
}

struct Pattern {
  std::vector<std::size_t> row_ptr, col_idx;
};

Pattern build_pattern(const Mesh& mesh, const DofMap& dofs) {
  const std::size_t n = dofs.n_free();
  std::vector<std::vector<std::size_t>> rows(n);
  std::vector<std::size_t> cn(mesh.nodes_per_cell());
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    mesh.cell_nodes(c, cn);
    for (std::size_t a = 0; a < cn.size(); ++a) {
      const std::int64_t fi = dofs.node_to_free[cn[a]];
      if (fi < 0) continue;
      for (std::size_t b = 0; b < cn.size(); ++b) {
        const std::int64_t fj = dofs.node_to_free[cn[b]];
        if (fj >= 0) rows[fi].push_back(static_cast<std::size_t>(fj));
      }
    }
  }
  Pattern p;
  p.row_ptr.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    auto& r = rows[i];
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
    p.row_ptr[i + 1] = p.row_ptr[i] + r.size();
  }
  p.col_idx.reserve(p.row_ptr[n]);
  for (const auto& r : rows) p.col_idx.insert(p.col_idx.end(), r.begin(), r.end());
  return p;
}

void add_entry(const Pattern& p, std::vector<double>& vals, std::size_t i,
               std::size_t j, double v) {
  const auto begin = p.col_idx.begin() + static_cast<std::ptrdiff_t>(p.row_ptr[i]);
  const auto end = p.col_idx.begin() + static_cast<std::ptrdiff_t>(p.row_ptr[i + 1]);
  const auto it = std::lower_bound(begin, end, j);
  vals[static_cast<std::size_t>(it - p.col_idx.begin())] += v;
}

struct FormContext {
  const Mesh* mesh;
  const DofMap* dofs;
  const Pattern* pattern;
  const FacetClass* facets;
  BoundField sigma, rho, robin_coeff;  // any may be null
  ShapeTable shape;
  GaussRule rule;
};

// Local stiffness+potential matrix of one cell under tensor Gauss quadrature.
void cell_local(const FormContext& ctx, std::size_t cell, std::span<double> local) {
  const Mesh& mesh = *ctx.mesh;
  const int dim = mesh.dim();
  const int nfn = ctx.shape.nfn;
  const int npt = ctx.shape.npt;
  const std::size_t npc = mesh.nodes_per_cell();
  std::fill(local.begin(), local.end(), 0.0);
  const std::array<double, 3> origin = mesh.cell_origin(cell);
  const std::array<double, 3> h = mesh.cell_size();
  double jac = 1.0;
  for (int a = 0; a < dim; ++a) jac *= h[a];

  std::vector<double> shape_n(npc), grad(npc * 3);
  const int py_max = dim > 1 ? npt : 1;
  const int pz_max = dim > 2 ? npt : 1;
  for (int pz = 0; pz < pz_max; ++pz)
    for (int py = 0; py < py_max; ++py)
      for (int px = 0; px < npt; ++px) {
        const int p[3] = {px, py, pz};
        std::array<double, 3> x = origin;
        double w = jac;
        for (int a = 0; a < dim; ++a) {
          x[a] += ctx.rule.x[p[a]] * h[a];
          w *= ctx.rule.w[p[a]];
        }
        const double sv = ctx.sigma ? checked_eval(ctx.sigma, x) : 0.0;
        const double rv = ctx.rho ? checked_eval(ctx.rho, x) : 0.0;
        if (sv == 0.0 && rv == 0.0) continue;
        // tensor shape values and physical gradients
        std::size_t idx = 0;
        const int l_max[3] = {nfn - 1, dim > 1 ? nfn - 1 : 0, dim > 2 ? nfn - 1 : 0};
        for (int lz = 0; lz <= l_max[2]; ++lz)
          for (int ly = 0; ly <= l_max[1]; ++ly)
            for (int lx = 0; lx <= l_max[0]; ++lx) {
              const int l[3] = {lx, ly, lz};
              double v = 1.0;
              double d[3] = {1.0, 1.0, 1.0};
              for (int a = 0; a < dim; ++a) {
                const double va = ctx.shape.val[p[a] * nfn + l[a]];
                const double da = ctx.shape.der[p[a] * nfn + l[a]] / h[a];
                v *= va;
                for (int b = 0; b < dim; ++b) d[b] *= (a == b) ? da : va;
              }
              shape_n[idx] = v;
              for (int a = 0; a < dim; ++a) grad[idx * 3 + a] = d[a];
              ++idx;
            }
        for (std::size_t a = 0; a < npc; ++a)
          for (std::size_t b = 0; b < npc; ++b) {
            double g = 0.0;
            if (sv != 0.0)
              for (int ax = 0; ax < dim; ++ax) g += grad[a * 3 + ax] * grad[b * 3 + ax];
            local[a * npc + b] += w * (sv * g + rv * shape_n[a] * shape_n[b]);
          }
      }
}

// Boundary mass of one Robin facet with coefficient robin_coeff.
void facet_local(const FormContext& ctx, const BoundaryFacet& f, std::span<double> local) {
  const Mesh& mesh = *ctx.mesh;
  const int dim = mesh.dim();
  const int nfn = ctx.shape.nfn;
  const int npt = ctx.shape.npt;
  const std::size_t npf = mesh.nodes_per_facet();
  std::fill(local.begin(), local.end(), 0.0);
  const std::array<double, 3> origin = mesh.cell_origin(f.cell);
  const std::array<double, 3> h = mesh.cell_size();
  std::array<int, 2> plane{};
  int np = 0;
  for (int a = 0; a < dim; ++a)
    if (a != f.axis) plane[np++] = a;
  double jac = 1.0;
  for (int a = 0; a < np; ++a) jac *= h[plane[a]];

  std::vector<double> shape_n(npf);
  const int p1_max = np > 1 ? npt : 1;
  const int p0_max = np > 0 ? npt : 1;
  for (int p1 = 0; p1 < p1_max; ++p1)
    for (int p0 = 0; p0 < p0_max; ++p0) {
      std::array<double, 3> x = origin;
      x[f.axis] += f.side * h[f.axis];
      double w = jac;
      const int p[2] = {p0, p1};
      for (int a = 0; a < np; ++a) {
        x[plane[a]] += ctx.rule.x[p[a]] * h[plane[a]];
        w *= ctx.rule.w[p[a]];
      }
      const double cv = checked_eval(ctx.robin_coeff, x);
      std::size_t idx = 0;
      const int l1_max = np > 1 ? nfn - 1 : 0;
      const int l0_max = np > 0 ? nfn - 1 : 0;
      for (int l1 = 0; l1 <= l1_max; ++l1)
        for (int l0 = 0; l0 <= l0_max; ++l0) {
          double v = 1.0;
          if (np > 0) v *= ctx.shape.val[p0 * nfn + l0];
          if (np > 1) v *= ctx.shape.val[p1 * nfn + l1];
          shape_n[idx++] = v;
        }
      for (std::size_t a = 0; a < npf; ++a)
        for (std::size_t b = 0; b < npf; ++b)
          local[a * npf + b] += w * cv * shape_n[a] * shape_n[b];
    }
}

void scatter(const FormContext& ctx, std::span<const std::size_t> nodes,
             std::span<const double> local, std::vector<double>& vals) {
  const std::size_t m = nodes.size();
  for (std::size_t a = 0; a < m; ++a) {
    const std::int64_t fi = ctx.dofs->node_to_free[nodes[a]];
    if (fi < 0) continue;
    for (std::size_t b = 0; b < m; ++b) {
      const std::int64_t fj = ctx.dofs->node_to_free[nodes[b]];
      if (fj < 0) continue;
      add_entry(*ctx.pattern, vals, static_cast<std::size_t>(fi),
                static_cast<std::size_t>(fj), local[a * m + b]);
    }
  }
}

constexpr std::size_t kBlock = 512;  // cells per parallel block

SparseSymMatrix assemble_form(const FormContext& ctx, bool parallel) {
  const Mesh& mesh = *ctx.mesh;
  const std::size_t n = ctx.dofs->n_free();
  std::vector<double> vals(ctx.pattern->col_idx.size(), 0.0);
  const std::size_t npc = mesh.nodes_per_cell();
  std::vector<std::size_t> nodes(npc);

  if (ctx.sigma || ctx.rho) {
    if (parallel) {
      std::vector<double> block_local(kBlock * npc * npc);
      std::exception_ptr failure;
      for (std::size_t base = 0; base < mesh.num_cells(); base += kBlock) {
        const std::size_t count = std::min(kBlock, mesh.num_cells() - base);
#pragma omp parallel for schedule(static)
        for (std::int64_t k = 0; k < static_cast<std::int64_t>(count); ++k) {
          try {
            cell_local(ctx, base + static_cast<std::size_t>(k),
                       std::span<double>(block_local.data() + k * npc * npc, npc * npc));
          } catch (...) {
#pragma omp critical
            if (!failure) failure = std::current_exception();
          }
        }
        if (failure) std::rethrow_exception(failure);
        // scatter serially in cell order so results match the reference bitwise
        for (std::size_t k = 0; k < count; ++k) {
          mesh.cell_nodes(base + k, nodes);
          scatter(ctx, nodes,
                  std::span<const double>(block_local.data() + k * npc * npc, npc * npc),
                  vals);
        }
      }
    } else {
      std::vector<double> local(npc * npc);
      for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
        cell_local(ctx, c, local);
        mesh.cell_nodes(c, nodes);
        scatter(ctx, nodes, local, vals);
      }
    }
  }

  if (ctx.robin_coeff) {
    const std::size_t npf = mesh.nodes_per_facet();
    std::vector<double> local(npf * npf);
    std::vector<std::size_t> fnodes(npf);
    for (std::size_t fi : ctx.facets->robin) {
      const BoundaryFacet& f = mesh.boundary_facets()[fi];
      facet_local(ctx, f, local);
      mesh.facet_nodes(f, fnodes);
      scatter(ctx, fnodes, local, vals);
    }
  }

  return SparseSymMatrix(n, ctx.pattern->row_ptr, ctx.pattern->col_idx, std::move(vals));
}

AssembledPencil assemble_impl(const ParametricProblem& problem, const Mesh& mesh,
                              std::span<const double> mu, bool parallel) {
  if (!problem.contains(mu)) throw ConfigError("parameter outside the problem domain");
  std::vector<double> mu_vec(mu.begin(), mu.end());
  const BoundField alpha = bind_field(problem.alpha, mu_vec);
  const BoundField beta = bind_field(problem.beta, mu_vec);
  auto [dofs, facets] = classify_dofs(mesh, alpha, beta);
  const Pattern pattern = build_pattern(mesh, dofs);
  const GaussRule rule = gauss_rule(mesh.order() + 2);
  const ShapeTable shape = make_shape_table(mesh.order(), rule);

  FormContext ctx;
  ctx.mesh = &mesh;
  ctx.dofs = &dofs;
  ctx.pattern = &pattern;
  ctx.facets = &facets;
  ctx.rule = rule;
  ctx.shape = shape;

  AssembledPencil out;
  ctx.sigma = bind_field(problem.sigma, mu_vec);
  ctx.rho = bind_field(problem.rho, mu_vec);
  if (!facets.robin.empty()) {
    ctx.robin_coeff = [alpha, beta](const std::array<double, 3>& x) {
      const double b = beta(x);
      if (b <= 0.0) throw QuadratureDomainError("beta not positive on Robin facet");
      return alpha(x) / b;
    };
  }
  out.a = assemble_form(ctx, parallel);

  ctx.sigma = nullptr;
  ctx.rho = [](const std::array<double, 3>&) { return 1.0; };
  ctx.robin_coeff = nullptr;
  out.m = assemble_form(ctx, parallel);
  out.dofs = std::move(dofs);
  return out;
}

}  // namespace

AssembledPencil assemble(const ParametricProblem& problem, const Mesh& mesh,
                         std::span<const double> mu) {
  return assemble_impl(problem, mesh, mu, true);
}

AssembledPencil assemble_reference(const ParametricProblem& problem, const Mesh& mesh,
                                   std::span<const double> mu) {
  return assemble_impl(problem, mesh, mu, false);
}

std::pair<SparseSymMatrix, SparseSymMatrix> AffineOperators::at(
    std::span<const double> mu) const {
  SparseSymMatrix a = a_terms[0];
  {
    std::vector<double>& v = a.values();
    const double t0 = a_thetas[0](mu);
    for (double& x : v) x *= t0;
  }
  for (std::size_t q = 1; q < a_terms.size(); ++q)
    a = sparse_add(1.0, a, a_thetas[q](mu), a_terms[q]);
  SparseSymMatrix m = m_terms[0];
  {
    std::vector<double>& v = m.values();
    const double t0 = m_thetas[0](mu);
    for (double& x : v) x *= t0;
  }
  for (std::size_t q = 1; q < m_terms.size(); ++q)
    m = sparse_add(1.0, m, m_thetas[q](mu), m_terms[q]);
  return {std::move(a), std::move(m)};
}

AffineOperators assemble_affine_terms(const ParametricProblem& problem, const Mesh& mesh) {
  if (!problem.has_affine)
    throw NoAffineForm(problem.name + " has no affine parameter decomposition");
  // boundary classification must be parameter-independent for the affine
  // split; evaluate at the lower corner of D
  std::vector<double> mu_ref;
  for (const auto& box : problem.param_box) mu_ref.push_back(box[0]);
  const BoundField alpha = bind_field(problem.alpha, mu_ref);
  const BoundField beta = bind_field(problem.beta, mu_ref);
  auto [dofs, facets] = classify_dofs(mesh, alpha, beta);
  const Pattern pattern = build_pattern(mesh, dofs);
  const GaussRule rule = gauss_rule(mesh.order() + 2);
  const ShapeTable shape = make_shape_table(mesh.order(), rule);

  FormContext ctx;
  ctx.mesh = &mesh;
  ctx.dofs = &dofs;
  ctx.pattern = &pattern;
  ctx.facets = &facets;
  ctx.rule = rule;
  ctx.shape = shape;

  AffineOperators out;
  for (const AffineTerm& term : problem.affine_a) {
    ctx.sigma = bind_field(term.sigma, mu_ref);
    ctx.rho = bind_field(term.rho, mu_ref);
    ctx.robin_coeff = bind_field(term.robin, mu_ref);
    out.a_terms.push_back(assemble_form(ctx, true));
    out.a_thetas.push_back(term.theta);
  }
  for (const AffineMassTerm& term : problem.affine_m) {
    ctx.sigma = nullptr;
    ctx.rho = bind_field(term.weight, mu_ref);
    ctx.robin_coeff = nullptr;
    out.m_terms.push_back(assemble_form(ctx, true));
    out.m_thetas.push_back(term.theta);
  }
  out.dofs = std::move(dofs);
  return out;
}

}  // namespace rbeigs
