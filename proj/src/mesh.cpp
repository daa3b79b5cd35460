#include "rbeigs/mesh.hpp"

#include <algorithm>
#include <cmath>

#include "rbeigs/csv.hpp"
#include "rbeigs/errors.hpp"

namespace rbeigs {

namespace {

int domain_dim(Domain d) {
  switch (d) {
    case Domain::interval: return 1;
    case Domain::square: return 2;
    default: return 3;
  }
}

std::int64_t ipow(std::int64_t b, int e) {
  std::int64_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

}  // namespace

std::array<int, 3> Mesh::grid_cell_coords(std::int64_t flat) const {
  std::array<int, 3> c{0, 0, 0};
  c[0] = static_cast<int>(flat % ncells_[0]);
  flat /= ncells_[0];
  c[1] = static_cast<int>(flat % ncells_[1]);
  c[2] = static_cast<int>(flat / ncells_[1]);
  return c;
}

std::array<double, 3> Mesh::node_coord(std::size_t node) const {
  std::int64_t flat = grid_of_node_[node];
  std::array<double, 3> x{0.0, 0.0, 0.0};
  for (int a = 0; a < dim_; ++a) {
    const std::int64_t j = flat % nnodes_axis_[a];
    flat /= nnodes_axis_[a];
    x[a] = lo_[a] + static_cast<double>(j) * hnode_[a];
  }
  return x;
}

void Mesh::cell_nodes(std::size_t cell, std::span<std::size_t> out) const {
  const std::array<int, 3> c = grid_cell_coords(cells_[cell]);
  const int q = order_;
  std::size_t idx = 0;
  const int lz_max = dim_ > 2 ? q : 0;
  const int ly_max = dim_ > 1 ? q : 0;
  for (int lz = 0; lz <= lz_max; ++lz)
    for (int ly = 0; ly <= ly_max; ++ly)
      for (int lx = 0; lx <= q; ++lx) {
        const std::int64_t gx = static_cast<std::int64_t>(q) * c[0] + lx;
        const std::int64_t gy = static_cast<std::int64_t>(q) * c[1] + ly;
        const std::int64_t gz = static_cast<std::int64_t>(q) * c[2] + lz;
        const std::int64_t flat =
            gx + nnodes_axis_[0] * (gy + static_cast<std::int64_t>(nnodes_axis_[1]) * gz);
        out[idx++] = static_cast<std::size_t>(node_id_of_grid_[flat]);
      }
}

void Mesh::facet_nodes(const BoundaryFacet& f, std::span<std::size_t> out) const {
  const std::array<int, 3> c = grid_cell_coords(cells_[f.cell]);
  const int q = order_;
  std::array<int, 3> fixed{0, 0, 0};
  fixed[f.axis] = f.side * q;
  std::size_t idx = 0;
  // iterate the in-plane axes in ascending axis order, x fastest
  std::array<int, 2> plane{};
  int np = 0;
  for (int a = 0; a < dim_; ++a)
    if (a != f.axis) plane[np++] = a;
  const int n0 = np > 0 ? q : 0;
  const int n1 = np > 1 ? q : 0;
  for (int l1 = 0; l1 <= n1; ++l1)
    for (int l0 = 0; l0 <= n0; ++l0) {
      std::array<int, 3> l = fixed;
      if (np > 0) l[plane[0]] = l0;
      if (np > 1) l[plane[1]] = l1;
      const std::int64_t gx = static_cast<std::int64_t>(q) * c[0] + l[0];
      const std::int64_t gy = static_cast<std::int64_t>(q) * c[1] + l[1];
      const std::int64_t gz = static_cast<std::int64_t>(q) * c[2] + l[2];
      const std::int64_t flat =
          gx + nnodes_axis_[0] * (gy + static_cast<std::int64_t>(nnodes_axis_[1]) * gz);
      out[idx++] = static_cast<std::size_t>(node_id_of_grid_[flat]);
    }
}

std::array<double, 3> Mesh::cell_origin(std::size_t cell) const {
  const std::array<int, 3> c = grid_cell_coords(cells_[cell]);
  std::array<double, 3> x{0.0, 0.0, 0.0};
  for (int a = 0; a < dim_; ++a) x[a] = lo_[a] + c[a] * hcell_[a];
  return x;
}

Mesh build_mesh(const MeshSpec& spec) {
  Mesh m;
  m.dim_ = domain_dim(spec.domain);
  m.order_ = spec.element_order;
  if (m.order_ != 1 && m.order_ != 2)
    throw IncompatibleResolution("element order must be 1 or 2");
  for (int a = 0; a < m.dim_; ++a) {
    if (spec.cells[a] < 1)
      throw IncompatibleResolution("mesh needs at least one cell per axis");
    m.ncells_[a] = spec.cells[a];
    m.lo_[a] = spec.lo[a];
    m.hi_[a] = spec.hi[a];
    if (!(m.hi_[a] > m.lo_[a]))
      throw IncompatibleResolution("domain extent must be positive");
    m.hcell_[a] = (m.hi_[a] - m.lo_[a]) / m.ncells_[a];
    m.hnode_[a] = m.hcell_[a] / m.order_;
    m.nnodes_axis_[a] = m.order_ * m.ncells_[a] + 1;
  }
  for (int a = m.dim_; a < 3; ++a) {
    m.ncells_[a] = 1;
    m.nnodes_axis_[a] = 1;
  }
  if (spec.domain == Domain::fichera) {
    for (int a = 0; a < 3; ++a)
      if (m.ncells_[a] % 2 != 0)
        throw IncompatibleResolution(
            "Fichera mesh needs an even cell count per axis");
  }
  m.nodes_per_cell_ = static_cast<std::size_t>(ipow(m.order_ + 1, m.dim_));
  m.nodes_per_facet_ = static_cast<std::size_t>(ipow(m.order_ + 1, m.dim_ - 1));

  const std::int64_t ngrid_cells =
      static_cast<std::int64_t>(m.ncells_[0]) * m.ncells_[1] * m.ncells_[2];
  m.cell_id_of_grid_.assign(ngrid_cells, -1);
  for (std::int64_t flat = 0; flat < ngrid_cells; ++flat) {
    bool active = true;
    if (spec.domain == Domain::fichera) {
      const std::array<int, 3> c = m.grid_cell_coords(flat);
      active = false;
      for (int a = 0; a < 3; ++a) {
        const double center = m.lo_[a] + (c[a] + 0.5) * m.hcell_[a];
        if (center > 0.0) active = true;  // outside the removed octant
      }
    }
    if (active) {
      m.cell_id_of_grid_[flat] = static_cast<std::int64_t>(m.cells_.size());
      m.cells_.push_back(flat);
    }
  }

  const std::int64_t ngrid_nodes = static_cast<std::int64_t>(m.nnodes_axis_[0]) *
                                   m.nnodes_axis_[1] * m.nnodes_axis_[2];
  std::vector<char> node_active(ngrid_nodes, spec.domain != Domain::fichera);
  if (spec.domain == Domain::fichera) {
    const int q = m.order_;
    for (std::int64_t flat : m.cells_) {
      const std::array<int, 3> c = m.grid_cell_coords(flat);
      for (int lz = 0; lz <= q; ++lz)
        for (int ly = 0; ly <= q; ++ly)
          for (int lx = 0; lx <= q; ++lx) {
            const std::int64_t g =
                (static_cast<std::int64_t>(q) * c[0] + lx) +
                static_cast<std::int64_t>(m.nnodes_axis_[0]) *
                    ((static_cast<std::int64_t>(q) * c[1] + ly) +
                     static_cast<std::int64_t>(m.nnodes_axis_[1]) *
                         (static_cast<std::int64_t>(q) * c[2] + lz));
            node_active[g] = 1;
          }
    }
  }
  m.node_id_of_grid_.assign(ngrid_nodes, -1);
  for (std::int64_t g = 0; g < ngrid_nodes; ++g)
    if (node_active[g]) {
      m.node_id_of_grid_[g] = static_cast<std::int64_t>(m.grid_of_node_.size());
      m.grid_of_node_.push_back(g);
    }
  m.num_nodes_ = m.grid_of_node_.size();

  // boundary facets: faces with no active neighbor
  for (std::size_t cid = 0; cid < m.cells_.size(); ++cid) {
    const std::array<int, 3> c = m.grid_cell_coords(m.cells_[cid]);
    for (int axis = 0; axis < m.dim_; ++axis)
      for (int side = 0; side < 2; ++side) {
        std::array<int, 3> nb = c;
        nb[axis] += side ? 1 : -1;
        bool outer = nb[axis] < 0 || nb[axis] >= m.ncells_[axis];
        bool has_neighbor = false;
        if (!outer) {
          const std::int64_t nflat =
              nb[0] + static_cast<std::int64_t>(m.ncells_[0]) *
                          (nb[1] + static_cast<std::int64_t>(m.ncells_[1]) * nb[2]);
          has_neighbor = m.cell_id_of_grid_[nflat] >= 0;
        }
        if (!has_neighbor) {
          BoundaryFacet f;
          f.cell = cid;
          f.axis = axis;
          f.side = side;
          f.label = outer ? (2 * axis + side) : (2 * m.dim_ + 2 * axis + side);
          m.facets_.push_back(f);
        }
      }
  }
  return m;
}

void write_point_cloud_csv(const std::filesystem::path& path, const Mesh& mesh,
                           const std::vector<std::vector<double>>& fields,
                           const std::vector<std::string>& field_names) {
  CsvWriter w(path);
  std::vector<std::string> hdr;
  const char* axes[3] = {"x", "y", "z"};
  for (int a = 0; a < mesh.dim(); ++a) hdr.push_back(axes[a]);
  for (std::size_t f = 0; f < fields.size(); ++f)
    hdr.push_back(f < field_names.size() ? field_names[f] : "f" + std::to_string(f));
  w.header(hdr);
  std::vector<std::string> row;
  for (std::size_t i = 0; i < mesh.num_nodes(); ++i) {
    row.clear();
    const std::array<double, 3> x = mesh.node_coord(i);
    for (int a = 0; a < mesh.dim(); ++a) row.push_back(format_g17(x[a]));
    for (const auto& f : fields) row.push_back(format_g17(f[i]));
    w.row(row);
  }
}

}  // namespace rbeigs
