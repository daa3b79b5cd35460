#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace rbeigs {

enum class Domain { interval, square, cube, fichera };

/// Tensor-product mesh request. For the Fichera domain the bounding box is
/// (-1,1)^3 and the octant (-1,0]^3 is carved out; cells per axis must be
/// even so the reentrant corner lies on the grid.
struct MeshSpec {
  Domain domain = Domain::interval;
  std::array<double, 3> lo{0.0, 0.0, 0.0};
  std::array<double, 3> hi{1.0, 1.0, 1.0};
  std::array<int, 3> cells{1, 1, 1};
  int element_order = 1;  // 1 (P1/Q1) or 2 (Q2)
};

struct BoundaryFacet {
  std::size_t cell;  // mesh cell owning the face
  int axis;          // normal direction
  int side;          // 0 = low face, 1 = high face
  int label;         // 2*axis+side for outer faces; 2*dim+2*axis+side reentrant
};

/// Uniform tensor-product Lagrange mesh with lexicographic node numbering.
class Mesh {
 public:
  int dim() const noexcept { return dim_; }
  int order() const noexcept { return order_; }
  std::size_t num_nodes() const noexcept { return num_nodes_; }
  std::size_t num_cells() const noexcept { return cells_.size(); }
  std::size_t nodes_per_cell() const noexcept { return nodes_per_cell_; }
  std::size_t nodes_per_facet() const noexcept { return nodes_per_facet_; }

  /// Cell extent along each axis.
  std::array<double, 3> cell_size() const noexcept { return hcell_; }
  std::array<double, 3> node_coord(std::size_t node) const;

  /// Node ids of a cell, lexicographic local ordering (x fastest).
  void cell_nodes(std::size_t cell, std::span<std::size_t> out) const;
  /// Node ids of a boundary facet, lexicographic in the in-plane axes.
  void facet_nodes(const BoundaryFacet& f, std::span<std::size_t> out) const;
  /// Low corner of a cell in physical coordinates.
  std::array<double, 3> cell_origin(std::size_t cell) const;

  const std::vector<BoundaryFacet>& boundary_facets() const noexcept { return facets_; }

  friend Mesh build_mesh(const MeshSpec& spec);

 private:
  int dim_ = 1;
  int order_ = 1;
  std::array<int, 3> ncells_{1, 1, 1};          // grid cells per axis
  std::array<int, 3> nnodes_axis_{2, 1, 1};     // grid nodes per axis
  std::array<double, 3> lo_{}, hi_{}, hcell_{}, hnode_{};
  std::size_t num_nodes_ = 0;
  std::size_t nodes_per_cell_ = 2, nodes_per_facet_ = 1;
  std::vector<std::int64_t> cells_;             // active cell -> flat grid cell
  std::vector<std::int64_t> cell_id_of_grid_;   // flat grid cell -> active id or -1
  std::vector<std::int64_t> node_id_of_grid_;   // flat grid node -> node id or -1
  std::vector<std::int64_t> grid_of_node_;      // node id -> flat grid node
  std::vector<BoundaryFacet> facets_;

  std::array<int, 3> grid_cell_coords(std::int64_t flat) const;
};

/// Throws IncompatibleResolution when the cell counts do not tile the domain.
Mesh build_mesh(const MeshSpec& spec);

/// Nodes (and optional per-node fields) as a CSV point cloud.
void write_point_cloud_csv(const std::filesystem::path& path, const Mesh& mesh,
                           const std::vector<std::vector<double>>& fields = {},
                           const std::vector<std::string>& field_names = {});

}  // namespace rbeigs
